"""Verificação independente das soluções explícitas.

Os resíduos das equações governantes usam as quadraturas de ``fraccalc`` e diferenças
finitas em x, sem recorrer às identidades de derivação da função de Wright.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

import numpy as np

from fracstefan.config import CONFIGURACAO
from fracstefan.estrutura_de_dados import (
    DimensionlessConfig,
    Fase,
    FrontCoefficient,
    ResidualReport,
    SampledFn,
    SweepRow,
)
from fracstefan.exceptions import DomainError, FracStefanError, GridError, RegionError
from fracstefan.fraccalc import caputo_derivative_num, rl_derivative_num
from fracstefan.specialfn import gamma, mainardi, wright
from fracstefan.stefan import SolutionTriple, rl_solution, solve_front

logger = logging.getLogger(__name__)

TEMPOS_VERIFICACAO = (0.5, 1.0, 2.0)
POSICOES_RELATIVAS = (0.25, 0.5, 0.75)
T_MINIMO = 0.05


def verification_points(sol: SolutionTriple, phase: Fase) -> list[tuple[float, float]]:
    """Pontos padrão: posições 0.25, 0.5 e 0.75 do trecho da fase em t = 0.5, 1 e 2.

    A fase 2 ocupa (0, s(t)); para a fase 1 o trecho considerado é (s(t), 3 s(t)).
    """
    pontos = []
    for t in TEMPOS_VERIFICACAO:
        s = sol.s(t)
        for r in POSICOES_RELATIVAS:
            x = r * s if phase == 2 else s * (1.0 + 2.0 * r)
            pontos.append((x, t))
    return pontos


def _avaliador(sol: SolutionTriple, phase: Fase):
    return (sol.u1, sol.lam1) if phase == 1 else (sol.u2, sol.lam2)


def _checar_regiao(sol: SolutionTriple, phase: Fase, x: float, t: float) -> None:
    if t < T_MINIMO:
        raise DomainError(f"t = {t} abaixo de {T_MINIMO}: a quadratura degrada perto de t = 0")
    s = sol.s(t)
    dentro = (0.0 < x < s) if phase == 2 else (x > s)
    if not dentro:
        raise RegionError(f"O ponto ({x:g}, {t:g}) não está na fase {phase} (s(t) = {s:g})")


def _segunda_diferenca(u, x, t, h):
    return (
        -u(x + 2 * h, t) + 16 * u(x + h, t) - 30 * u(x, t) + 16 * u(x - h, t) - u(x - 2 * h, t)
    ) / (12.0 * h**2)


def _primeira_diferenca(g, centro, h):
    return (-g(centro + 2 * h) + 8 * g(centro + h) - 8 * g(centro - h) + g(centro - 2 * h)) / (12.0 * h)


def _passo_x(sol: SolutionTriple, lam: float, t):
    return CONFIGURACAO.passo_espacial * lam * np.asarray(t, dtype=float) ** sol.rho


def grade_graduada(t: float, nos: int, alpha: float, extras: int = 0) -> np.ndarray:
    """Grade temporal de ``nos`` nós em [0, t + extras h], graduada em direção a 0.

    A primeira metade dos nós é uniforme em tau**(alpha/2) (expoente limitado por
    ``CONFIGURACAO.graduacao_maxima``) e cobre a camada inicial onde o perfil de Wright
    varia; a segunda metade é uniforme com passo h, igual ao último passo graduado, e
    tem t como nó exato seguido de ``extras`` nós.
    """
    if not t > 0.0:
        raise DomainError("É preciso t > 0")
    n_graduados = nos // 2
    n_ate_t = nos - n_graduados - 1 - extras
    if n_ate_t < 1:
        raise GridError(f"{nos} nós não comportam {extras} nó(s) além de t")
    r = min(2.0 / alpha, CONFIGURACAO.graduacao_maxima)
    t_a = t / (1.0 + r * n_ate_t / n_graduados)
    h = r * t_a / n_graduados
    graduados = t_a * (np.arange(n_graduados) / n_graduados) ** r
    uniformes = t_a + h * np.arange(n_ate_t + 1 + extras)
    uniformes[n_ate_t] = t
    return np.concatenate([graduados, uniformes])


def _residuo_caputo(sol, phase, x, t, nos):
    u, lam = _avaliador(sol, phase)
    tau = grade_graduada(t, nos, sol.alpha)
    valores = np.empty_like(tau)
    valores[0] = sol.initial_limit_1 if phase == 1 else sol.initial_limit_2
    valores[1:] = u(x, tau[1:])
    derivada = caputo_derivative_num(SampledFn(t_grid=tau, values=valores), sol.alpha, t)
    h = float(_passo_x(sol, lam, t))
    return derivada - lam**2 * _segunda_diferenca(u, x, t, h)


def _residuo_rl(sol, phase, x, t, nos):
    u, lam = _avaliador(sol, phase)
    tau = grade_graduada(t, nos, sol.alpha, extras=2)
    u_xx = np.zeros_like(tau)
    h = _passo_x(sol, lam, tau[1:])
    u_xx[1:] = _segunda_diferenca(u, x, tau[1:], h)
    derivada_fracionaria = rl_derivative_num(
        SampledFn(t_grid=tau, values=u_xx), 1.0 - sol.alpha, t
    )
    derivada_t = _primeira_diferenca(lambda s: u(x, s), t, CONFIGURACAO.passo_temporal * t)
    return derivada_t - lam**2 * derivada_fracionaria


def _residuo_classico(sol, phase, x, t):
    u, lam = _avaliador(sol, phase)
    derivada_t = _primeira_diferenca(lambda s: u(x, s), t, CONFIGURACAO.passo_temporal * t)
    h = float(_passo_x(sol, lam, t))
    return derivada_t - lam**2 * _segunda_diferenca(u, x, t, h)


def pde_residual(
    sol: SolutionTriple,
    phase: Fase,
    points: Optional[Iterable[tuple[float, float]]] = None,
    *,
    expoente_grade: Optional[int] = None,
) -> ResidualReport:
    """Resíduos da equação governante da fase ``phase`` nos pontos dados.

    - caputo: derivada de Caputo (L1) de u(x, .) menos lambda² d2u/dx2;
    - rl: du/dt menos lambda² vezes a derivada de Riemann-Liouville de ordem 1 - alpha de
      d2u/dx2(x, .);
    - classical, ou qualquer sabor com alpha = 1: du/dt - lambda² d2u/dx2 por diferenças
      finitas.

    Raises:
        RegionError: Se algum ponto não está estritamente dentro da fase.
    """
    pontos = list(points) if points is not None else verification_points(sol, phase)
    nos = 2 ** (expoente_grade or CONFIGURACAO.expoente_grade)
    residuos = []
    for x, t in pontos:
        _checar_regiao(sol, phase, x, t)
        if sol.flavor == "classical" or sol.alpha == 1.0:
            r = _residuo_classico(sol, phase, x, t)
        elif sol.flavor == "caputo":
            r = _residuo_caputo(sol, phase, x, t, nos)
        else:
            r = _residuo_rl(sol, phase, x, t, nos)
        residuos.append(float(r))
    norma = max((abs(r) for r in residuos), default=0.0)
    logger.info(f"Resíduo {sol.flavor} fase {phase}: norma_inf = {norma:.3e} ({nos} nós)")
    return ResidualReport(
        points=pontos,
        residuals=residuos,
        norm_inf=norma,
        grid_resolution=nos,
        phase=phase,
        flavor=sol.flavor,
    )


def _fluxo_rl(sol: SolutionTriple, amplitude: float, lam: float, z: float, t: float) -> float:
    """Derivada RL de ordem 1 - alpha de du/dx no traço x = z lam t**(alpha/2)."""
    rho = sol.rho
    fator = rho * (wright(-z, -rho, 1.0 + rho) + z * wright(-z, -rho, 1.0))
    return -amplitude / lam * t ** (rho - 1.0) * fator


def stefan_condition_residual(sol: SolutionTriple, t: float = 1.0) -> float:
    """Diferença assinada entre os dois lados da condição de Stefan, em forma fechada.

    caputo: rho l D^alpha s = k1 u1_x(s+) - k2 u2_x(s-);
    rl: rho l ds/dt = k1 D^(1-alpha) u1_x - k2 D^(1-alpha) u2_x nos traços da frente;
    classical: rho l ds/dt = k1 u1_x(s+) - k2 u2_x(s-).
    """
    c = sol.coef
    lam_til = sol.lam_tilde
    a1, a2 = sol.amplitude1, sol.amplitude2
    if sol.flavor == "classical":
        lado_esquerdo = sol.rho_l * c * sol.lam1 / math.sqrt(t)
        u1x = -a1 * math.exp(-(c**2)) / (sol.lam1 * math.sqrt(math.pi * t))
        u2x = -a2 * math.exp(-((c * lam_til) ** 2)) / (sol.lam2 * math.sqrt(math.pi * t))
        return lado_esquerdo - (sol.k1 * u1x - sol.k2 * u2x)

    rho = sol.rho
    if sol.flavor == "caputo":
        lado_esquerdo = sol.rho_l * gamma(1.0 + rho) / gamma(1.0 - rho) * 2.0 * c * sol.lam1 * t ** (-rho)
        u1x = -a1 / (sol.lam1 * t**rho) * mainardi(2.0 * c, rho)
        u2x = -a2 / (sol.lam2 * t**rho) * mainardi(2.0 * c * lam_til, rho)
        return lado_esquerdo - (sol.k1 * u1x - sol.k2 * u2x)

    lado_esquerdo = sol.rho_l * c * sol.lam1 * sol.alpha * t ** (rho - 1.0)
    fluxo1 = _fluxo_rl(sol, a1, sol.lam1, 2.0 * c, t)
    fluxo2 = _fluxo_rl(sol, a2, sol.lam2, 2.0 * c * lam_til, t)
    return lado_esquerdo - (sol.k1 * fluxo1 - sol.k2 * fluxo2)


def limit_interchange_gap(
    cfg: DimensionlessConfig, coef: FrontCoefficient, t: float = 1.0
) -> tuple[float, float]:
    """Os dois candidatos a fluxo RL da fase 1 na frente.

    O primeiro toma a derivada em x fixo e depois o limite x -> r(t)+; o segundo aplica
    a derivada ao traço t -> u1_x(r(t), t). Ambos têm o sinal de B1 = -1/W(-2 eta).

    Returns:
        tuple[float, float]: (limite após a derivada, derivada do traço).
    """
    if not 0.0 < cfg.alpha < 1.0:
        raise DomainError(f"alpha fora de (0, 1): {cfg.alpha}")
    if not t > 0.0:
        raise DomainError("É preciso t > 0")
    rho = cfg.alpha / 2.0
    eta = coef.value
    b1 = -1.0 / wright(-2.0 * eta, -rho, 1.0)
    escala = b1 * t ** (rho - 1.0)
    limite_depois = escala * wright(-2.0 * eta, -rho, rho)
    traco = escala * gamma(1.0 - rho) / gamma(rho) * mainardi(2.0 * eta, rho)
    return limite_depois, traco


def limit_interchange_trace_num(
    cfg: DimensionlessConfig,
    coef: FrontCoefficient,
    t: float = 1.0,
    *,
    expoente_grade: Optional[int] = None,
) -> float:
    """Quadratura da derivada RL de ordem 1 - alpha de u1_x(r(t), .) em x fixo = r(t).

    Aproxima o primeiro valor de ``limit_interchange_gap``.
    """
    sol = rl_solution(cfg, coef)
    x = sol.s(t)
    nos = 2 ** (expoente_grade or CONFIGURACAO.expoente_grade)
    tau = grade_graduada(t, nos, cfg.alpha, extras=2)
    u_x = np.zeros_like(tau)
    h = _passo_x(sol, sol.lam1, tau[1:])
    u_x[1:] = _primeira_diferenca(lambda y: sol.u1(y, tau[1:]), x, h)
    return rl_derivative_num(SampledFn(t_grid=tau, values=u_x), 1.0 - cfg.alpha, t)


def h_alpha(x, alpha: float):
    """Gamma(alpha/2) W(-x; -alpha/2; alpha/2) - Gamma(1 - alpha/2) M_{alpha/2}(x)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha fora de (0, 1): {alpha}")
    x_array = np.asarray(x, dtype=float)
    if not np.all(x_array > 0.0):
        raise DomainError("h_alpha exige x > 0")
    rho = alpha / 2.0
    return gamma(rho) * wright(-x_array if np.ndim(x) else -float(x), -rho, rho) - gamma(
        1.0 - rho
    ) * mainardi(x, rho)


def _linha(cfg_base: DimensionlessConfig, alpha: float, eta_classico: float) -> SweepRow:
    try:
        cfg = cfg_base.com_alpha(alpha)
        xi = solve_front(cfg, "caputo").value
        eta = solve_front(cfg, "rl").value
    except FracStefanError as erro:
        logger.error(f"Varredura falhou em alpha = {alpha}: {erro}")
        return SweepRow(alpha=alpha, eta_classical=eta_classico, falhou=True)
    return SweepRow(
        alpha=alpha,
        xi=xi,
        eta=eta,
        eta_classical=eta_classico,
        gap_xi_eta=abs(xi - eta),
        gap_eta_classical=abs(eta - eta_classico),
    )


def alpha_sweep(cfg_base: DimensionlessConfig, alphas: Iterable[float]) -> list[SweepRow]:
    """Resolve xi_alpha e eta_alpha para cada alpha (ordenado) e compara com eta_1.

    As linhas são calculadas num pool de até ``CONFIGURACAO.threads`` workers; a ordem
    de saída segue alpha. Linhas cujo solve falha saem com ``falhou = True`` e nan.
    """
    alphas = sorted(float(a) for a in alphas)
    for a in alphas:
        if not 0.0 < a <= 1.0:
            raise DomainError(f"alpha fora de (0, 1]: {a}")
    eta_classico = solve_front(cfg_base, "classical").value
    with ThreadPoolExecutor(max_workers=CONFIGURACAO.threads) as executor:
        linhas = list(executor.map(lambda a: _linha(cfg_base, a, eta_classico), alphas))
    falhas = sum(linha.falhou for linha in linhas)
    logger.info(f"Varredura: {len(linhas)} linha(s), {falhas} falha(s)")
    return linhas

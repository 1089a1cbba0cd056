"""Equações da frente e soluções explícitas dos problemas de Stefan fracionários de duas fases.

Convenções adimensionais: lambda_1 = 1, lambda_2 = cfg.lam, k_1 = 1, k_2 = cfg.k_ratio,
U_i = -1, U_m = 0, U_0 = cfg.U e rho*l = 1/cfg.Ste. Os resíduos adimensionais vêm
multiplicados por Ste; o de Caputo vem ainda dividido por Gamma(1 - alpha/2).
"""

import logging
import math
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict

from fracstefan.config import CONFIGURACAO
from fracstefan.estrutura_de_dados import (
    DimensionlessConfig,
    FrontCoefficient,
    PhaseConfig,
    Sabor,
    SubdiffusionCoefficients,
)
from fracstefan.exceptions import DegenerateError, DomainError, NoRootError, NonConvergenceError
from fracstefan.specialfn import (
    corte_relativo,
    erf,
    erfc,
    gamma,
    mainardi,
    um_menos_wright,
    um_menos_wright_negativo,
    wright,
    wright_negativo,
)

logger = logging.getLogger(__name__)

_LIMIAR_DEGENERADO = 1e-14
_RAIZ_PI = math.sqrt(math.pi)


def _preparar(x: ArrayLike) -> np.ndarray:
    array = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(array > 0.0):
        raise DomainError("As funções da frente exigem x > 0")
    return array


def _saida(valor: np.ndarray, entrada):
    if np.ndim(entrada) == 0:
        return float(valor[0])
    return valor.reshape(np.shape(entrada))


def _rho(alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha fora de (0, 1]: {alpha}")
    return alpha / 2.0


def _w1(x: np.ndarray, rho: float) -> np.ndarray:
    w = wright(-x, -rho, 1.0)
    if np.any(np.abs(w) <= _LIMIAR_DEGENERADO):
        raise DegenerateError(f"W(-x; -{rho:g}; 1) se anula em x = {x[np.abs(w) <= _LIMIAR_DEGENERADO][0]:g}")
    return w


def _um_menos_w1(x: np.ndarray, rho: float) -> np.ndarray:
    w = um_menos_wright(x, rho)
    if np.any(np.abs(w) <= _LIMIAR_DEGENERADO):
        raise DegenerateError(f"1 - W(-x; -{rho:g}; 1) se anula em x = {x[np.abs(w) <= _LIMIAR_DEGENERADO][0]:g}")
    return w


def f1(x: ArrayLike, alpha: float):
    """F1(x) = M_{alpha/2}(x) / W(-x; -alpha/2; 1)."""
    array, rho = _preparar(x), _rho(alpha)
    return _saida(mainardi(array, rho) / _w1(array, rho), x)


def f2(x: ArrayLike, alpha: float):
    """F2(x) = M_{alpha/2}(x) / (1 - W(-x; -alpha/2; 1))."""
    array, rho = _preparar(x), _rho(alpha)
    return _saida(mainardi(array, rho) / _um_menos_w1(array, rho), x)


def g1(x: ArrayLike, alpha: float):
    """G1(x) = W(-x; -alpha/2; 1 + alpha/2) / W(-x; -alpha/2; 1)."""
    array, rho = _preparar(x), _rho(alpha)
    return _saida(wright(-array, -rho, 1.0 + rho) / _w1(array, rho), x)


def g2(x: ArrayLike, alpha: float):
    """G2(x) = (2/alpha) W(-x; -alpha/2; alpha/2) / (1 - W(-x; -alpha/2; 1))."""
    array, rho = _preparar(x), _rho(alpha)
    return _saida(wright(-array, -rho, rho) / _um_menos_w1(array, rho) / rho, x)


# --------------------------------------------------------------------------
# resíduos adimensionais
# --------------------------------------------------------------------------
def caputo_front_residual(x: ArrayLike, cfg: DimensionlessConfig):
    """Ste [U k/lam F2(2x/lam) - F1(2x)] - 2 Gamma(1+alpha/2)/Gamma(1-alpha/2) x."""
    array = _preparar(x)
    alpha = cfg.alpha
    razao = gamma(1.0 + alpha / 2.0) / gamma(1.0 - alpha / 2.0)
    valor = (
        cfg.Ste * (cfg.U * cfg.k_ratio / cfg.lam * f2(2.0 * array / cfg.lam, alpha) - f1(2.0 * array, alpha))
        - 2.0 * razao * array
    )
    return _saida(valor, x)


def rl_front_residual(x: ArrayLike, cfg: DimensionlessConfig):
    """(Ste/alpha) [U k/lam W(-2x/lam; alpha/2)/(1 - W(-2x/lam; 1)) - W(-2x; alpha/2)/W(-2x; 1)] - x."""
    array = _preparar(x)
    rho = _rho(cfg.alpha)
    y = 2.0 * array / cfg.lam
    fase2 = wright(-y, -rho, rho) / _um_menos_w1(y, rho)
    fase1 = wright(-2.0 * array, -rho, rho) / _w1(2.0 * array, rho)
    valor = cfg.Ste / cfg.alpha * (cfg.U * cfg.k_ratio / cfg.lam * fase2 - fase1) - array
    return _saida(valor, x)


def rl_front_residual_g(x: ArrayLike, cfg: DimensionlessConfig):
    """Forma G1/G2: Ste U k/lam G2(2x/lam) - Ste G1(2x) - 2 (1 + Ste) x, igual a 2 rl_front_residual."""
    array = _preparar(x)
    valor = (
        cfg.Ste * cfg.U * cfg.k_ratio / cfg.lam * g2(2.0 * array / cfg.lam, cfg.alpha)
        - cfg.Ste * g1(2.0 * array, cfg.alpha)
        - 2.0 * (1.0 + cfg.Ste) * array
    )
    return _saida(valor, x)


def neumann_residual(x: ArrayLike, cfg: DimensionlessConfig):
    """Ste [U k/lam exp(-x²/lam²)/(sqrt(pi) erf(x/lam)) - exp(-x²)/(sqrt(pi) erfc(x))] - x.

    Independe de ``cfg.alpha``.
    """
    array = _preparar(x)
    y = array / cfg.lam
    fase2 = np.exp(-(y**2)) / (_RAIZ_PI * erf(y))
    fase1 = np.exp(-(array**2)) / (_RAIZ_PI * erfc(array))
    valor = cfg.Ste * (cfg.U * cfg.k_ratio / cfg.lam * fase2 - fase1) - array
    return _saida(valor, x)


def fixed_point_map(x: ArrayLike, cfg: DimensionlessConfig, flavor: Sabor):
    """Mapas f_alpha (rl/classical) e g_alpha (caputo) cujo ponto fixo é o coeficiente da frente."""
    base = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    if flavor == "caputo":
        razao = gamma(1.0 - cfg.alpha / 2.0) / (2.0 * gamma(1.0 + cfg.alpha / 2.0))
        return base + razao * caputo_front_residual(x, cfg)
    if flavor == "rl":
        return base + rl_front_residual(x, cfg)
    return base + neumann_residual(x, cfg)


_RESIDUOS: dict[str, Callable] = {
    "caputo": caputo_front_residual,
    "rl": rl_front_residual,
    "classical": neumann_residual,
}


# --------------------------------------------------------------------------
# busca da raiz
# --------------------------------------------------------------------------
def _janela(alpha: float, flavor: Sabor, lam: float) -> tuple[float, float]:
    rho = 0.5 if flavor == "classical" else alpha / 2.0
    topo = corte_relativo(rho) / (2.0 * max(1.0, 1.0 / lam))
    return CONFIGURACAO.janela_min, min(CONFIGURACAO.janela_max, topo)


def _bisseccao(
    residuo: Callable[[float], float], lo: float, hi: float, r_lo: float, tol_residuo: float
):
    """Bissecção até esgotar a resolução de ponto flutuante do intervalo.

    Aceita o resultado se o intervalo final é menor que ``tol_intervalo`` e o resíduo
    no ponto devolvido não passa de ``tol_residuo``.
    """
    melhor, r_melhor = lo, r_lo
    iteracao = 0
    for iteracao in range(1, CONFIGURACAO.max_iter_bisseccao + 1):
        meio = 0.5 * (lo + hi)
        r_meio = residuo(meio)
        logger.debug(f"bissecção {iteracao}: [{lo:.16g}, {hi:.16g}] r = {r_meio:.3e}")
        if abs(r_meio) <= abs(r_melhor):
            melhor, r_melhor = meio, r_meio
        if r_meio == 0.0:
            break
        if np.sign(r_meio) == np.sign(r_lo):
            lo, r_lo = meio, r_meio
        else:
            hi = meio
        if hi - lo <= 2.0 * np.spacing(meio):
            break
    lo, hi = min(lo, melhor), max(hi, melhor)
    if hi - lo < CONFIGURACAO.tol_intervalo and abs(r_melhor) <= tol_residuo:
        return melhor, lo, hi, r_melhor, iteracao
    raise NonConvergenceError(
        f"Bissecção não convergiu em {iteracao} iterações "
        f"(intervalo {hi - lo:.3e}, r = {r_melhor:.3e})"
    )


def _resolver(
    residuo: Callable,
    janela: tuple[float, float],
    flavor: Sabor,
    pontos: Optional[int] = None,
    tol_residuo: Optional[float] = None,
) -> FrontCoefficient:
    grade = np.geomspace(janela[0], janela[1], pontos or CONFIGURACAO.pontos_varredura)
    valores = np.asarray(residuo(grade), dtype=float)
    sinais = np.sign(valores)
    trocas = np.nonzero(sinais[:-1] * sinais[1:] < 0.0)[0]
    zeros = np.nonzero(sinais == 0.0)[0]
    raizes = sorted(set(trocas.tolist()) | set(zeros.tolist()))
    if not raizes:
        raise NoRootError(
            f"Nenhuma troca de sinal do resíduo {flavor} em [{janela[0]:g}, {janela[1]:g}]"
        )
    logger.info(
        f"Varredura {flavor}: {len(raizes)} troca(s) de sinal; "
        f"intervalo [{grade[raizes[0]]:.6g}, {grade[min(raizes[0] + 1, grade.size - 1)]:.6g}]"
    )
    if len(raizes) > 1 and flavor != "caputo":
        logger.warning(f"Resíduo {flavor} com {len(raizes)} trocas de sinal; usando a menor raiz")

    i = raizes[0]
    if sinais[i] == 0.0:
        valor, lo, hi, r, iteracoes = grade[i], grade[i], grade[i], 0.0, 0
    else:
        valor, lo, hi, r, iteracoes = _bisseccao(
            lambda s: float(residuo(s)), float(grade[i]),
            float(grade[i + 1]),
            float(valores[i]),
            tol_residuo or CONFIGURACAO.tol_residuo,
        )
    return FrontCoefficient(
        value=valor,
        bracket_lo=lo,
        bracket_hi=hi,
        residual=r,
        iterations=iteracoes,
        roots_found=len(raizes),
        flavor=flavor,
    )


def solve_front(
    cfg: DimensionlessConfig,
    flavor: Sabor,
    *,
    janela: Optional[tuple[float, float]] = None,
    pontos: Optional[int] = None,
    tol_residuo: Optional[float] = None,
) -> FrontCoefficient:
    """Coeficiente da frente por varredura geométrica seguida de bissecção.

    Para ``caputo`` com mais de uma troca de sinal, devolve a menor raiz positiva.

    Args:
        cfg (DimensionlessConfig): Instância adimensional.
        flavor: "caputo", "rl" ou "classical".
        janela: Intervalo de varredura; por padrão o limite de precisão da série.
        pontos: Pontos log-espaçados da varredura.
        tol_residuo: Tolerância do resíduo na raiz.

    Raises:
        NoRootError: Se não há troca de sinal na janela.
        NonConvergenceError: Se a bissecção esgota o orçamento de iterações.
    """
    residuo = _RESIDUOS[flavor]
    return _resolver(
        lambda x: residuo(x, cfg),
        janela or _janela(cfg.alpha, flavor, cfg.lam),
        flavor,
        pontos=pontos,
        tol_residuo=tol_residuo,
    )


# --------------------------------------------------------------------------
# forma dimensional
# --------------------------------------------------------------------------
def mu_alpha(p: PhaseConfig) -> float:
    """mu_alpha = (x0² / lambda_1²)**(1 - alpha), com dimensão t**(1 - alpha)."""
    return (p.x0**2 / p.lam1**2) ** (1.0 - p.alpha)


def subdiffusion_coefficients(p: PhaseConfig) -> SubdiffusionCoefficients:
    mu = mu_alpha(p)
    return SubdiffusionCoefficients(
        lam_a1=p.lam1 * math.sqrt(mu),
        lam_a2=p.lam2 * math.sqrt(mu),
        k_a1=p.k1 * mu,
        k_a2=p.k2 * mu,
    )


def to_dimensionless(p: PhaseConfig) -> DimensionlessConfig:
    """Reduz ``p`` às variáveis y = x/x0, tau = lambda_1² t / x0², u = (w - U_m)/(U_m - U_i).

    Com U_m = 0 dá (lambda_2/lambda_1, k2/k1, U_0/|U_i|, |U_i| c1 / l, alpha).
    """
    return DimensionlessConfig(
        lam=p.lam2 / p.lam1,
        k_ratio=p.k2 / p.k1,
        U=(p.U_0 - p.U_m) / (p.U_m - p.U_i),
        Ste=(p.U_m - p.U_i) * p.c1 / p.latent_l,
        alpha=p.alpha,
    )


def caputo_front_residual_dim(x: ArrayLike, p: PhaseConfig):
    """Equação de xi_alpha com lambda_alpha_i e k_alpha_i substituídos."""
    array = _preparar(x)
    s = subdiffusion_coefficients(p)
    lam_til = s.lam_a1 / s.lam_a2
    alpha = p.alpha
    valor = (
        gamma(1.0 - alpha / 2.0)
        * (
            s.k_a2 * (p.U_0 - p.U_m) / s.lam_a2 * f2(2.0 * lam_til * array, alpha)
            - s.k_a1 * (p.U_m - p.U_i) / s.lam_a1 * f1(2.0 * array, alpha)
        )
        - 2.0 * gamma(1.0 + alpha / 2.0) * s.lam_a1 * p.rho_mass * p.latent_l * array
    )
    return _saida(valor, x)


def rl_front_residual_dim(x: ArrayLike, p: PhaseConfig):
    """Equação de eta_alpha com lambda_alpha_i e k_alpha_i substituídos."""
    array = _preparar(x)
    s = subdiffusion_coefficients(p)
    lam_til = s.lam_a1 / s.lam_a2
    rho = _rho(p.alpha)
    y = 2.0 * lam_til * array
    fase2 = wright(-y, -rho, rho) / _um_menos_w1(y, rho)
    fase1 = wright(-2.0 * array, -rho, rho) / _w1(2.0 * array, rho)
    valor = (
        s.k_a2 * (p.U_0 - p.U_m) / (s.lam_a1 * s.lam_a2 * p.alpha) * fase2
        - s.k_a1 * (p.U_m - p.U_i) / (s.lam_a1**2 * p.alpha) * fase1
        - p.rho_mass * p.latent_l * array
    )
    return _saida(valor, x)


def _neumann_residual_dim(x: ArrayLike, p: PhaseConfig):
    array = _preparar(x)
    lam_til = p.lam1 / p.lam2
    y = lam_til * array
    fase2 = np.exp(-(y**2)) / (_RAIZ_PI * erf(y))
    fase1 = np.exp(-(array**2)) / (_RAIZ_PI * erfc(array))
    valor = (
        p.k2 * (p.U_0 - p.U_m) / (p.lam1 * p.lam2) * fase2
        - p.k1 * (p.U_m - p.U_i) / p.lam1**2 * fase1
        - p.rho_mass * p.latent_l * array
    )
    return _saida(valor, x)


def solve_front_dim(p: PhaseConfig, flavor: Sabor) -> FrontCoefficient:
    """Resolve a equação dimensional, normalizada pela escala do termo de fase 1 vezes Ste."""
    s = subdiffusion_coefficients(p)
    ste = (p.U_m - p.U_i) * p.c1 / p.latent_l
    if flavor == "caputo":
        escala = ste * s.lam_a1 / (gamma(1.0 - p.alpha / 2.0) * s.k_a1 * (p.U_m - p.U_i))
        residuo = caputo_front_residual_dim
    elif flavor == "rl":
        escala = ste * s.lam_a1**2 / (s.k_a1 * (p.U_m - p.U_i))
        residuo = rl_front_residual_dim
    else:
        escala = ste * p.lam1**2 / (p.k1 * (p.U_m - p.U_i))
        residuo = _neumann_residual_dim
    janela = _janela(p.alpha, flavor, p.lam2 / p.lam1)
    return _resolver(lambda x: escala * np.asarray(residuo(x, p)), janela, flavor)


# --------------------------------------------------------------------------
# soluções explícitas
# --------------------------------------------------------------------------
class SolutionTriple(BaseModel):
    """Solução explícita (u1, u2, s) em forma de similaridade.

    A fase 2 (líquida) ocupa 0 < x < s(t) e a fase 1 (sólida) x > s(t).

    Attributes:
        flavor: Equação cujo coeficiente define a frente.
        config: Configuração de origem.
        front_coef: Coeficiente da frente.
        alpha: Ordem fracionária (1 para ``classical``).
        lam1, lam2: Coeficientes de difusão lambda_alpha_i.
        k1, k2: Condutividades k_alpha_i.
        rho_l: Produto densidade vezes calor latente.
        U_i, U_m, U_0: Temperaturas inicial, de fusão e de fronteira.
    """

    model_config = ConfigDict(frozen=True)

    flavor: Sabor
    config: Union[DimensionlessConfig, PhaseConfig]
    front_coef: FrontCoefficient
    alpha: float
    lam1: float
    lam2: float
    k1: float
    k2: float
    rho_l: float
    U_i: float
    U_m: float
    U_0: float

    @property
    def coef(self) -> float:
        return self.front_coef.value

    @property
    def rho(self) -> float:
        return self.alpha / 2.0

    @property
    def lam_tilde(self) -> float:
        return self.lam1 / self.lam2

    @property
    def amplitude1(self) -> float:
        """(U_m - U_i) / W(-2 coef; -alpha/2; 1)."""
        if self.flavor == "classical":
            return (self.U_m - self.U_i) / erfc(self.coef)
        return (self.U_m - self.U_i) / float(wright_negativo(2.0 * self.coef, self.rho, 1.0))

    @property
    def amplitude2(self) -> float:
        """(U_0 - U_m) / (1 - W(-2 coef lam_tilde; -alpha/2; 1))."""
        if self.flavor == "classical":
            return (self.U_0 - self.U_m) / erf(self.coef * self.lam_tilde)
        return (self.U_0 - self.U_m) / float(
            um_menos_wright_negativo(2.0 * self.coef * self.lam_tilde, self.rho)
        )

    def _similaridade(self, x: ArrayLike, t: ArrayLike, lam: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0.0):
            raise DomainError("Os avaliadores exigem t > 0")
        if np.any(x < 0.0):
            raise DomainError("Os avaliadores exigem x >= 0")
        return x / (lam * t**self.rho)

    def u1(self, x: ArrayLike, t: ArrayLike):
        """Temperatura da fase 1 (x > s(t))."""
        z = self._similaridade(x, t, self.lam1)
        if self.flavor == "classical":
            perfil = erfc(z / 2.0)
        else:
            perfil = wright_negativo(z, self.rho, 1.0)
        return _escalar(self.U_i + self.amplitude1 * perfil, x, t)

    def u2(self, x: ArrayLike, t: ArrayLike):
        """Temperatura da fase 2 (0 < x < s(t))."""
        z = self._similaridade(x, t, self.lam2)
        if self.flavor == "classical":
            complemento = erf(z / 2.0)
        else:
            complemento = um_menos_wright_negativo(z, self.rho)
        return _escalar(self.U_0 - self.amplitude2 * complemento, x, t)

    def s(self, t: ArrayLike):
        """Posição da frente 2 coef lam1 t**(alpha/2)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise DomainError("A frente exige t >= 0")
        valor = 2.0 * self.coef * self.lam1 * t**self.rho
        return float(valor) if valor.ndim == 0 else valor

    def temperature(self, x: ArrayLike, t: ArrayLike):
        """u2 antes da frente e u1 a partir dela."""
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return np.where(x < self.s(t), self.u2(x, t), self.u1(x, t))

    @property
    def initial_limit_1(self) -> float:
        """u1(x, 0+) para x > 0."""
        return self.U_i

    @property
    def initial_limit_2(self) -> float:
        """u2(x, 0+) para x > 0."""
        return self.U_0 - self.amplitude2


def _escalar(valor, x, t):
    if np.ndim(x) == 0 and np.ndim(t) == 0:
        return float(valor)
    return np.asarray(valor)


def _triple_adimensional(cfg: DimensionlessConfig, coef: FrontCoefficient, flavor: Sabor) -> SolutionTriple:
    if coef.flavor != flavor:
        raise DomainError(f"Coeficiente {coef.flavor} usado numa solução {flavor}")
    return SolutionTriple(
        flavor=flavor,
        config=cfg,
        front_coef=coef,
        alpha=1.0 if flavor == "classical" else cfg.alpha,
        lam1=1.0,
        lam2=cfg.lam,
        k1=1.0,
        k2=cfg.k_ratio,
        rho_l=1.0 / cfg.Ste,
        U_i=-1.0,
        U_m=0.0,
        U_0=cfg.U,
    )


def caputo_solution(cfg: DimensionlessConfig, coef: FrontCoefficient) -> SolutionTriple:
    return _triple_adimensional(cfg, coef, "caputo")


def rl_solution(cfg: DimensionlessConfig, coef: FrontCoefficient) -> SolutionTriple:
    return _triple_adimensional(cfg, coef, "rl")


def neumann_solution(cfg: DimensionlessConfig, coef: FrontCoefficient) -> SolutionTriple:
    return _triple_adimensional(cfg, coef, "classical")


def dimensional_solution(p: PhaseConfig, coef: FrontCoefficient) -> SolutionTriple:
    """Solução em variáveis físicas com lambda_alpha_i e k_alpha_i."""
    if coef.flavor == "classical":
        lam1, lam2, k1, k2, alpha = p.lam1, p.lam2, p.k1, p.k2, 1.0
    else:
        s = subdiffusion_coefficients(p)
        lam1, lam2, k1, k2, alpha = s.lam_a1, s.lam_a2, s.k_a1, s.k_a2, p.alpha
    return SolutionTriple(
        flavor=coef.flavor,
        config=p,
        front_coef=coef,
        alpha=alpha,
        lam1=lam1,
        lam2=lam2,
        k1=k1,
        k2=k2,
        rho_l=p.rho_mass * p.latent_l,
        U_i=p.U_i,
        U_m=p.U_m,
        U_0=p.U_0,
    )


def solution(cfg: DimensionlessConfig, flavor: Sabor) -> SolutionTriple:
    """Resolve a frente e monta a solução adimensional do sabor pedido."""
    coef = solve_front(cfg, flavor)
    return _triple_adimensional(cfg, coef, flavor)

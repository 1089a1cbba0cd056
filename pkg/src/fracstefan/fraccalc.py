"""Operadores fracionários: regras de potência em forma fechada e quadraturas de núcleo
singular usadas como oráculos independentes de verificação."""

import logging
import math
from typing import Literal, Optional

import numpy as np

from fracstefan.config import CONFIGURACAO
from fracstefan.estrutura_de_dados import SampledFn
from fracstefan.exceptions import DomainError, GridError
from fracstefan.specialfn import gamma, mittag_leffler, rgamma, wright, wright_negativo

logger = logging.getLogger(__name__)

Testemunha = Literal["w1", "w2", "w3"]


def rl_integral_power(a: float, alpha: float, beta: float, t: float) -> float:
    """Integral de Riemann-Liouville de ordem alpha de (t - a)**beta.

    Args:
        a (float): Limite inferior.
        alpha (float): Ordem, em (0, 2).
        beta (float): Expoente, beta > -1.
        t (float): Instante, t > a.

    Returns:
        float: Gamma(beta+1)/Gamma(beta+alpha+1) * (t-a)**(beta+alpha).
    """
    _validar_potencia(a, alpha, beta, t, alpha_max=2.0)
    return gamma(beta + 1.0) / gamma(beta + alpha + 1.0) * (t - a) ** (beta + alpha)


def rl_derivative_power(a: float, alpha: float, beta: float, t: float) -> float:
    """Derivada de Riemann-Liouville de ordem alpha de (t - a)**beta (nula se beta = alpha - 1)."""
    _validar_potencia(a, alpha, beta, t, alpha_max=1.0)
    if math.isclose(beta, alpha - 1.0, rel_tol=0.0, abs_tol=1e-14):
        return 0.0
    return gamma(beta + 1.0) * rgamma(beta - alpha + 1.0) * (t - a) ** (beta - alpha)


def _validar_potencia(a: float, alpha: float, beta: float, t: float, alpha_max: float) -> None:
    if not beta > -1.0:
        raise DomainError(f"A regra de potência exige beta > -1 (beta = {beta})")
    if not 0.0 < alpha < alpha_max:
        raise DomainError(f"Ordem fora de (0, {alpha_max:g}): alpha = {alpha}")
    if not t > a:
        raise DomainError(f"É preciso t > a (t = {t}, a = {a})")


def _recortar(f: SampledFn, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Nós e valores de ``f`` em [0, t], com t como último nó (interpolação linear)."""
    if not 0.0 < t <= f.t_max:
        raise GridError(f"t = {t} fora da grade (0, {f.t_max}]")
    m = int(np.searchsorted(f.t_grid, t, side="left"))
    if f.t_grid[m] == t:
        return f.t_grid[: m + 1], f.values[: m + 1]
    valor_t = np.interp(t, f.t_grid, f.values)
    return np.append(f.t_grid[:m], t), np.append(f.values[:m], valor_t)


def rl_integral_num(f: SampledFn, alpha: float, t: float) -> float:
    """Integral de Riemann-Liouville por trapézio-produto.

    ``f`` é tomada linear por partes e o núcleo (t - tau)**(alpha-1) é integrado
    analiticamente em cada subintervalo.

    Raises:
        GridError: Se t está fora de (0, max(t_grid)].
    """
    if not alpha > 0.0:
        raise DomainError(f"Ordem deve ser positiva: alpha = {alpha}")
    tau, valores = _recortar(f, t)
    a = t - tau[:-1]
    b = t - tau[1:]
    h = np.diff(tau)
    inclinacao = np.diff(valores) / h
    i0 = (a**alpha - b**alpha) / alpha
    i1 = (a ** (alpha + 1.0) - b ** (alpha + 1.0)) / (alpha + 1.0)
    soma = np.sum(valores[:-1] * i0 + inclinacao * (a * i0 - i1))
    return float(soma / gamma(alpha))


def caputo_derivative_num(f: SampledFn, alpha: float, t: float) -> float:
    """Derivada de Caputo pelo esquema L1, com pesos exatos de (t - tau)**(-alpha).

    Raises:
        GridError: Se t está fora de (0, max(t_grid)].
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Ordem fora de (0, 1): alpha = {alpha}")
    tau, valores = _recortar(f, t)
    expoente = 1.0 - alpha
    pesos = (t - tau[:-1]) ** expoente - (t - tau[1:]) ** expoente
    soma = np.sum(np.diff(valores) / np.diff(tau) * pesos)
    return float(soma / gamma(2.0 - alpha))


def rl_derivative_num(f: SampledFn, alpha: float, t: float) -> float:
    """Derivada de Riemann-Liouville de ordem alpha: d/dt da integral de ordem 1 - alpha.

    A derivada temporal é uma diferença central de 5 pontos com passo igual ao
    espaçamento da grade em t.

    Raises:
        GridError: Se t < 10 h ou t + 2 h ultrapassa a grade.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Ordem fora de (0, 1): alpha = {alpha}")
    if not 0.0 < t <= f.t_max:
        raise GridError(f"t = {t} fora da grade (0, {f.t_max}]")
    m = max(1, int(np.searchsorted(f.t_grid, t, side="left")))
    h = float(f.t_grid[m] - f.t_grid[m - 1])
    if t < 10.0 * h:
        raise GridError(f"t = {t} perto demais de 0 para o estêncil (h = {h:g})")
    if t + 2.0 * h > f.t_max * (1.0 + 1e-12):
        raise GridError(f"t = {t} perto demais do fim da grade (h = {h:g})")

    def integral(s: float) -> float:
        return rl_integral_num(f, 1.0 - alpha, min(s, f.t_max))

    return (
        -integral(t + 2 * h) + 8 * integral(t + h) - 8 * integral(t - h) + integral(t - 2 * h)
    ) / (12.0 * h)


def wright_ialpha_map(c: float, rho: float, beta: float, alpha: float, t: float) -> float:
    """Imagem de t**(beta-1) W(-c t**(-rho); -rho; beta) pela integral de ordem alpha.

    Returns:
        float: t**(beta+alpha-1) * W(-c t**(-rho); -rho; beta+alpha).
    """
    if not (c > 0.0 and t > 0.0):
        raise DomainError(f"É preciso c > 0 e t > 0 (c = {c}, t = {t})")
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho fora de (0, 1): rho = {rho}")
    return t ** (beta + alpha - 1.0) * wright(-c * t ** (-rho), -rho, beta + alpha)


# --------------------------------------------------------------------------
# condição de equivalência entre as formulações de Caputo e Riemann-Liouville
# --------------------------------------------------------------------------
def witness(nome: Testemunha, x: float, t: float, alpha: float) -> float:
    """Valor de uma das três soluções-testemunha da equação subdifusiva (lambda = 1).

    - w1 = x**2 + 2 t**alpha / Gamma(alpha+1)
    - w2 = E_alpha(t**alpha) exp(-x)
    - w3 = W(-x t**(-alpha/2); -alpha/2; 1)
    """
    if nome == "w1":
        return x**2 + 2.0 * t**alpha / gamma(alpha + 1.0)
    if nome == "w2":
        return mittag_leffler(t**alpha, alpha) * math.exp(-x)
    if nome == "w3":
        return float(wright_negativo(x * t ** (-alpha / 2.0), alpha / 2.0, 1.0))
    raise ValueError(f"Testemunha desconhecida: {nome}")


def _derivada_segunda(nome: Testemunha, x: float, tau: np.ndarray, alpha: float) -> np.ndarray:
    if nome == "w1":
        return np.full_like(tau, 2.0)
    if nome == "w2":
        return mittag_leffler(tau**alpha, alpha) * math.exp(-x)
    if nome == "w3":
        valores = np.zeros_like(tau)
        positivo = tau > 0.0
        s = tau[positivo]
        valores[positivo] = s ** (-alpha) * wright_negativo(x * s ** (-alpha / 2.0), alpha / 2.0, 1.0 - alpha)
        return valores
    raise ValueError(f"Testemunha desconhecida: {nome}")


def equivalence_condition(
    nome: Testemunha, x: float, t: float, alpha: float, expoente_grade: Optional[int] = None
) -> float:
    """Integral de ordem alpha de d2u/dx2 da testemunha ``nome`` em (x, t), por quadratura.

    O limite t -> 0 deste valor deve ser nulo para que as formulações de Caputo e
    Riemann-Liouville da equação governante sejam equivalentes.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Ordem fora de (0, 1): alpha = {alpha}")
    if nome == "w3" and not x > 0.0:
        raise DomainError("A testemunha w3 exige x > 0")
    nos = 2 ** (expoente_grade or CONFIGURACAO.expoente_grade)
    tau = np.linspace(0.0, t, nos)
    u_xx = SampledFn(t_grid=tau, values=_derivada_segunda(nome, x, tau, alpha))
    return rl_integral_num(u_xx, alpha, t)

"""Funções especiais: Gamma, erro, Wright, Mainardi e Mittag-Leffler.

A série de Wright

    W(x; rho; beta) = sum_k x**k / (k! * Gamma(rho*k + beta))

é avaliada com coeficientes calculados em alta precisão (mpmath), guardados como pares
double-double, e um esquema de Horner double-double vetorizado em numpy. Quando o fator de
cancelamento estimado passa de ``CONFIGURACAO.limiar_cancelamento`` o ponto é refeito
integralmente em mpmath, com precisão proporcional ao cancelamento.

O contexto global ``mpmath.mp`` nunca é alterado: cada thread usa contextos próprios, um
por precisão, de modo que as funções podem ser chamadas de qualquer número de threads.
"""

import logging
import math
import threading
from functools import lru_cache
from typing import Literal, Optional, Union

import mpmath as mp
import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from fracstefan.config import CONFIGURACAO
from fracstefan.estrutura_de_dados import WrightArgs
from fracstefan.exceptions import DomainError, NonConvergenceError, PoleError

logger = logging.getLogger(__name__)

Modo = Literal["relativo", "absoluto"]

_LANCZOS_G = 7
_LANCZOS_COEFICIENTES = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_RAIZ_2PI = math.sqrt(2.0 * math.pi)

_DIVISOR_DEKKER = 134217729.0  # 2**27 + 1
_DPS_COEFICIENTES = 40
_MARGEM_TERMOS = 90.0  # nats abaixo do maior termo
_LOG_MENOR_NORMAL = -700.0
_BLOCO_TERMOS = 64

_LOCAL = threading.local()


def _contexto(dps: int) -> mp.MPContext:
    """Contexto mpmath da thread corrente com precisão fixa de ``dps`` dígitos."""
    contextos = getattr(_LOCAL, "contextos", None)
    if contextos is None:
        contextos = _LOCAL.contextos = {}
    ctx = contextos.get(dps)
    if ctx is None:
        ctx = mp.MPContext()
        ctx.dps = dps
        contextos[dps] = ctx
    return ctx


def _eh_polo(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def gamma(x: float) -> float:
    """Função Gamma de Euler por aproximação de Lanczos (g = 7, 9 coeficientes).

    Args:
        x (float): Argumento real.

    Returns:
        float: Gamma(x).

    Raises:
        PoleError: Se x for um inteiro não positivo.
    """
    x = float(x)
    if _eh_polo(x):
        raise PoleError(f"Gamma tem polo em x = {x:g}")
    if x < 0.5:
        # reflexão
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    soma = _LANCZOS_COEFICIENTES[0]
    for i, p in enumerate(_LANCZOS_COEFICIENTES[1:], start=1):
        soma += p / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _RAIZ_2PI * math.exp((z + 0.5) * math.log(t) - t) * soma


def rgamma(x: float) -> float:
    """1/Gamma(x), com valor 0 nos polos (continuação inteira)."""
    x = float(x)
    if _eh_polo(x):
        return 0.0
    return 1.0 / gamma(x)


def erf(x: ArrayLike) -> Union[float, np.ndarray]:
    """Função erro."""
    return _como_entrada(special.erf(np.asarray(x, dtype=float)), x)


def erfc(x: ArrayLike) -> Union[float, np.ndarray]:
    """Função erro complementar, sem cancelamento para x grande."""
    return _como_entrada(special.erfc(np.asarray(x, dtype=float)), x)


def _como_entrada(valor: np.ndarray, entrada) -> Union[float, np.ndarray]:
    valor = np.asarray(valor).reshape(np.shape(entrada))
    if valor.ndim == 0 and not isinstance(entrada, np.ndarray):
        return float(valor.item())
    return valor


# --------------------------------------------------------------------------
# aritmética double-double (vetorizada)
# --------------------------------------------------------------------------
def _dividir(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _DIVISOR_DEKKER * a
    alto = c - (c - a)
    return alto, a - alto


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    a_alto, a_baixo = _dividir(a)
    b_alto, b_baixo = _dividir(b)
    e = ((a_alto * b_alto - p) + a_alto * b_baixo + a_baixo * b_alto) + a_baixo * b_baixo
    return p, e


def _horner_dd(alto: np.ndarray, baixo: np.ndarray, x: np.ndarray) -> np.ndarray:
    b_alto = np.full_like(x, alto[-1])
    b_baixo = np.full_like(x, baixo[-1])
    for k in range(alto.size - 2, -1, -1):
        p, e = _two_prod(b_alto, x)
        e = e + b_baixo * x
        s, f = _two_sum(p, alto[k])
        f = f + e + baixo[k]
        b_alto, b_baixo = _quick_two_sum(s, f)
    return b_alto + b_baixo


# --------------------------------------------------------------------------
# coeficientes da série
# --------------------------------------------------------------------------
@lru_cache(maxsize=512)
def _log_coeficientes(rho: float, beta: float, n: int) -> np.ndarray:
    k = np.arange(n, dtype=float)
    with np.errstate(divide="ignore"):
        log_c = -special.gammaln(k + 1.0) - special.gammaln(rho * k + beta)
    polos = (rho * k + beta <= 0.0) & (rho * k + beta == np.floor(rho * k + beta))
    log_c[polos] = -np.inf
    log_c.setflags(write=False)
    return log_c


@lru_cache(maxsize=256)
def _coeficientes_mp(rho: float, beta: float, n: int, dps: int) -> tuple:
    ctx = _contexto(dps)
    r = ctx.mpf(rho)
    b = ctx.mpf(beta)
    return tuple(ctx.rgamma(k + 1) * ctx.rgamma(r * k + b) for k in range(n))


@lru_cache(maxsize=256)
def _coeficientes_dd(rho: float, beta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    coeficientes = _coeficientes_mp(rho, beta, n, _DPS_COEFICIENTES)
    ctx = _contexto(_DPS_COEFICIENTES)
    alto = np.array([float(c) for c in coeficientes])
    baixo = np.array([float(ctx.mpf(c) - ctx.mpf(h)) for c, h in zip(coeficientes, alto)])
    alto.setflags(write=False)
    baixo.setflags(write=False)
    return alto, baixo


def _arredondar_bloco(n: int) -> int:
    return min(CONFIGURACAO.max_termos, -(-n // _BLOCO_TERMOS) * _BLOCO_TERMOS)


def _numero_de_termos(rho: float, beta: float, x_max: float, margem: float) -> tuple[int, float]:
    """Termos necessários para que a cauda fique ``margem`` nats abaixo do maior termo.

    Returns:
        tuple[int, float]: O número de termos e o menor log|c_k| usado.

    Raises:
        NonConvergenceError: Se o orçamento de termos não basta.
    """
    log_c = _log_coeficientes(rho, beta, CONFIGURACAO.max_termos)
    if x_max == 0.0:
        return 1, float(log_c[0])
    log_termos = log_c + np.arange(log_c.size) * math.log(x_max)
    pico = np.max(log_termos)
    if not np.isfinite(pico):
        return 1, float(log_c[0])
    significativos = np.nonzero(log_termos >= pico - margem)[0]
    ultimo = int(significativos[-1])
    if ultimo >= log_c.size - 2:
        raise NonConvergenceError(
            f"A série de Wright (rho={rho}, beta={beta}) não converge em "
            f"{CONFIGURACAO.max_termos} termos para |x| = {x_max:g}"
        )
    n = ultimo + 2
    finitos = log_c[:n][np.isfinite(log_c[:n])]
    return n, float(finitos.min()) if finitos.size else 0.0


# --------------------------------------------------------------------------
# avaliação
# --------------------------------------------------------------------------
def _validar(x: np.ndarray, rho: float) -> None:
    if not rho > -1.0:
        raise DomainError(f"A série de Wright exige rho > -1 (rho = {rho})")
    if not np.all(np.isfinite(x)):
        raise DomainError("Argumento não finito na função de Wright")
    guarda = CONFIGURACAO.guarda_wright
    if x.size and np.max(np.abs(x)) > guarda:
        raise DomainError(
            f"|x| = {np.max(np.abs(x)):g} fora do domínio da série (|x| <= {guarda:g})"
        )


def _serie_mp(x: float, rho: float, beta: float, inicio: int, log10_kappa: float) -> float:
    """Soma a série em mpmath, elevando a precisão até cobrir o cancelamento."""
    dps = int(25 + max(0.0, log10_kappa))
    for _tentativa in range(6):
        n, _menor = _numero_de_termos(rho, beta, abs(x), dps * math.log(10.0))
        dps_balde = -(-dps // 20) * 20
        coeficientes = _coeficientes_mp(rho, beta, _arredondar_bloco(n), dps_balde)[inicio:n]
        ctx = _contexto(dps_balde)
        xm = ctx.mpf(x)
        soma = ctx.mpf(0)
        absoluta = ctx.mpf(0)
        for c in reversed(coeficientes):
            c = ctx.mpf(c)
            soma = soma * xm + c
            absoluta = absoluta * abs(xm) + abs(c)
        if inicio:
            soma *= xm
            absoluta *= abs(xm)
        if soma == 0:
            return 0.0
        kappa = float(ctx.log10(absoluta / abs(soma)))
        if kappa + 20 <= dps_balde:
            return float(soma)
        dps = int(kappa + 25)
    raise NonConvergenceError(f"Precisão insuficiente para W({x}; {rho}; {beta})")


def _serie(x: np.ndarray, rho: float, beta: float, inicio: int, modo: Modo) -> np.ndarray:
    x_max = float(np.max(np.abs(x))) if x.size else 0.0
    n, menor_log = _numero_de_termos(rho, beta, x_max, _MARGEM_TERMOS)
    if n <= inicio:
        return np.zeros_like(x)
    if menor_log < _LOG_MENOR_NORMAL:
        logger.debug(f"Coeficientes abaixo do menor normal; W({rho}, {beta}) em mpmath")
        return np.array([_serie_mp(float(xi), rho, beta, inicio, 16.0) for xi in x])

    alto, baixo = _coeficientes_dd(rho, beta, _arredondar_bloco(n))
    alto, baixo = alto[inicio:n], baixo[inicio:n]
    valor = _horner_dd(alto, baixo, x)
    absoluta = np.zeros_like(x) + np.abs(alto[-1])
    for c in np.abs(alto[-2::-1]):
        absoluta = absoluta * np.abs(x) + c
    if inicio:
        valor = valor * x
        absoluta = absoluta * np.abs(x)
    if modo == "absoluto":
        return valor

    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = absoluta / np.abs(valor)
    refazer = ~(kappa <= CONFIGURACAO.limiar_cancelamento)
    if np.any(refazer):
        logger.debug(
            f"W(rho={rho}, beta={beta}): {int(refazer.sum())} ponto(s) refeito(s) em mpmath"
        )
        for i in np.nonzero(refazer)[0]:
            log10_kappa = math.log10(kappa[i]) if np.isfinite(kappa[i]) else 40.0
            valor[i] = _serie_mp(float(x[i]), rho, beta, inicio, log10_kappa)
    return valor


def _avaliar(x, rho: float, beta: float, inicio: int, modo: Modo):
    rho = float(rho)
    beta = float(beta)
    array = np.atleast_1d(np.asarray(x, dtype=float))
    forma = array.shape
    array = array.ravel()
    _validar(array, rho)
    valor = _serie(array, rho, beta, inicio, modo).reshape(forma)
    return _como_entrada(valor, x)


def wright(
    x: Union[ArrayLike, WrightArgs],
    rho: Optional[float] = None,
    beta: Optional[float] = None,
    *,
    modo: Modo = "relativo",
) -> Union[float, np.ndarray]:
    """Função de Wright W(x; rho; beta).

    Args:
        x: Argumento (escalar ou array), ou um ``WrightArgs`` completo.
        rho (float): Segundo parâmetro, rho > -1.
        beta (float): Terceiro parâmetro.
        modo: "relativo" garante erro relativo pequeno refazendo em mpmath os pontos
            com cancelamento severo; "absoluto" usa somente double-double.

    Returns:
        float | np.ndarray: O valor da série, com a mesma forma de ``x``.

    Raises:
        DomainError: Se rho <= -1 ou |x| excede ``CONFIGURACAO.guarda_wright``.
        NonConvergenceError: Se o orçamento de termos se esgota.
    """
    if isinstance(x, WrightArgs):
        x, rho, beta = x.x, x.rho, x.beta
    return _avaliar(x, rho, beta, 0, modo)


def wright_dx(
    x: Union[ArrayLike, WrightArgs],
    rho: Optional[float] = None,
    beta: Optional[float] = None,
    *,
    modo: Modo = "relativo",
) -> Union[float, np.ndarray]:
    """Derivada em x da função de Wright: W(x; rho; rho + beta)."""
    if isinstance(x, WrightArgs):
        x, rho, beta = x.x, x.rho, x.beta
    return _avaliar(x, rho, rho + beta, 0, modo)


def um_menos_wright(z: ArrayLike, rho: float, *, modo: Modo = "relativo"):
    """1 - W(-z; -rho; 1) somando a série a partir de k = 1, sem cancelamento em z pequeno."""
    return -_avaliar(-np.asarray(z, dtype=float), -rho, 1.0, 1, modo)


def mainardi(x: ArrayLike, rho: float, *, modo: Modo = "relativo"):
    """Função de Mainardi M_rho(x) = W(-x; -rho; 1 - rho), 0 < rho < 1."""
    if not 0.0 < rho < 1.0:
        raise DomainError(f"A função de Mainardi exige 0 < rho < 1 (rho = {rho})")
    return wright(-np.asarray(x, dtype=float) if np.ndim(x) else -float(x), -rho, 1.0 - rho, modo=modo)


# --------------------------------------------------------------------------
# cauda de W(-z; -rho; beta), z >= 0
# --------------------------------------------------------------------------
def taxa_de_decaimento(rho: float) -> float:
    """Constante c de W(-z; -rho; beta) ~ exp(-c * z**(1/(1-rho))), 0 < rho < 1."""
    return (1.0 - rho) * rho ** (rho / (1.0 - rho))


def corte_de_cauda(rho: float) -> float:
    """Argumento a partir do qual W(-z; -rho; .) fica abaixo de ``limiar_cauda``."""
    c = taxa_de_decaimento(rho)
    z = (math.log(1.0 / CONFIGURACAO.limiar_cauda) / c) ** (1.0 - rho)
    return min(CONFIGURACAO.guarda_wright, z)


def corte_relativo(rho: float) -> float:
    """Argumento até o qual W(-z; -rho; .) mantém ~1e-10 de magnitude."""
    c = taxa_de_decaimento(rho)
    return (math.log(1e10) / c) ** (1.0 - rho)


def wright_negativo(z: ArrayLike, rho: float, beta: float) -> np.ndarray:
    """W(-z; -rho; beta) para z >= 0 em modo absoluto, nulo além do corte de cauda."""
    z = np.asarray(z, dtype=float)
    valor = np.zeros_like(z)
    dentro = z <= corte_de_cauda(rho)
    if np.any(dentro):
        valor[dentro] = wright(-z[dentro], -rho, beta, modo="absoluto")
    return valor


def um_menos_wright_negativo(z: ArrayLike, rho: float) -> np.ndarray:
    """1 - W(-z; -rho; 1) para z >= 0 em modo absoluto, igual a 1 além do corte de cauda."""
    z = np.asarray(z, dtype=float)
    valor = np.ones_like(z)
    dentro = z <= corte_de_cauda(rho)
    if np.any(dentro):
        valor[dentro] = um_menos_wright(z[dentro], rho, modo="absoluto")
    return valor


def mittag_leffler(z: ArrayLike, alpha: float, *, tol: float = 1e-17, max_termos: int = 500):
    """Função de Mittag-Leffler de um parâmetro E_alpha(z) = sum_k z**k / Gamma(alpha*k + 1).

    Soma direta em mpmath; adequada a |z| moderado.

    Raises:
        DomainError: Se alpha <= 0.
        NonConvergenceError: Se a série não atinge ``tol`` em ``max_termos`` termos.
    """
    if not alpha > 0.0:
        raise DomainError(f"Mittag-Leffler exige alpha > 0 (alpha = {alpha})")

    def escalar(zi: float) -> float:
        ctx = _contexto(30)
        zm = ctx.mpf(zi)
        soma = ctx.mpf(0)
        for k in range(max_termos):
            termo = zm**k * ctx.rgamma(alpha * k + 1)
            soma += termo
            if k > 2 and abs(termo) <= tol * abs(soma):
                return float(soma)
        raise NonConvergenceError(f"Mittag-Leffler não converge em z = {zi}")

    array = np.asarray(z, dtype=float)
    valor = np.vectorize(escalar, otypes=[float])(array)
    return _como_entrada(valor, z)

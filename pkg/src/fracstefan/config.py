import os
import logging

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

load_dotenv(find_dotenv(), override=True)

_NIVEIS_DE_LOG = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def nivel_de_log_do_ambiente() -> tuple[str, bool]:
    """FRACSTEFAN_LOG_LEVEL validado e se o valor lido era válido (senão, INFO)."""
    valor = os.getenv("FRACSTEFAN_LOG_LEVEL", "INFO").strip().upper()
    if valor in _NIVEIS_DE_LOG:
        return valor, True
    return "INFO", False


_handlers: list[logging.Handler] = [logging.StreamHandler()]  # stderr; stdout é da CLI
if os.getenv("FRACSTEFAN_LOG_FILE"):
    _handlers.append(logging.FileHandler(os.environ["FRACSTEFAN_LOG_FILE"]))

_nivel, _nivel_valido = nivel_de_log_do_ambiente()
logging.basicConfig(
    level=_nivel,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=_handlers,
)
if not _nivel_valido:
    logging.getLogger(__name__).warning(
        f"FRACSTEFAN_LOG_LEVEL inválido ({os.getenv('FRACSTEFAN_LOG_LEVEL')!r}); usando INFO"
    )


class ConfiguracaoNumerica(BaseModel):
    """Parâmetros numéricos compartilhados pelos módulos.

    Attributes:
        guarda_wright: Maior |x| aceito pela série de Wright.
        max_termos: Orçamento de termos da série de Wright.
        limiar_cancelamento: Fator de cancelamento a partir do qual a série é
            refeita em mpmath (modo relativo).
        limiar_cauda: Valor de W abaixo do qual os avaliadores de campo tratam a
            função como zero.
        janela_min, janela_max: Janela de varredura das equações da frente.
        pontos_varredura: Pontos log-espaçados da varredura.
        tol_intervalo, tol_residuo: Maior intervalo final e maior resíduo aceitos na bissecção.
        max_iter_bisseccao: Orçamento de iterações da bissecção.
        expoente_grade: Grades temporais de quadratura com 2**expoente_grade nós.
        passo_espacial: Passo das diferenças centrais em x, relativo à escala de similaridade.
        passo_temporal: Passo das diferenças centrais em t, relativo a t.
        graduacao_maxima: Maior expoente da graduação das grades temporais em direção a t = 0.
        threads: Teto do pool de workers das varreduras (FRACSTEFAN_THREADS).
    """

    model_config = ConfigDict(frozen=True)

    guarda_wright: PositiveFloat = 30.0
    max_termos: PositiveInt = 1000
    limiar_cancelamento: PositiveFloat = 1e20
    limiar_cauda: PositiveFloat = 1e-16
    janela_min: PositiveFloat = 1e-6
    janela_max: PositiveFloat = 30.0
    pontos_varredura: int = Field(default=128, ge=2)
    tol_intervalo: PositiveFloat = 1e-13
    tol_residuo: PositiveFloat = 1e-10
    max_iter_bisseccao: PositiveInt = 200
    expoente_grade: int = Field(default=11, ge=3, le=20)
    passo_espacial: PositiveFloat = 1e-3
    passo_temporal: PositiveFloat = 1e-4
    graduacao_maxima: PositiveFloat = Field(default=8.0, ge=1.0)
    threads: PositiveInt = 1


def _threads_do_ambiente() -> int:
    valor = os.getenv("FRACSTEFAN_THREADS", "1")
    try:
        return max(1, int(valor))
    except ValueError:
        logging.getLogger(__name__).warning(
            f"FRACSTEFAN_THREADS inválido ({valor!r}); usando 1"
        )
        return 1


CONFIGURACAO = ConfiguracaoNumerica(threads=_threads_do_ambiente())

"""Interface de linha de comando: wright, solve, sweep, field e verify.

Saídas numéricas usam 15 algarismos significativos; CSV com fim de linha LF e JSON com
ordem de chaves fixa.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from fracstefan.config import CONFIGURACAO
from fracstefan.estrutura_de_dados import GridField, RunConfig, WrightArgs
from fracstefan.exceptions import FracStefanError, GridError, VerificationFailedError
from fracstefan.specialfn import wright
from fracstefan.stefan import solution, solve_front
from fracstefan.verify import (
    alpha_sweep,
    limit_interchange_gap,
    pde_residual,
    stefan_condition_residual,
)

logger = logging.getLogger(__name__)

ALPHAS_PADRAO = [round(0.05 * k, 10) for k in range(1, 20)] + [0.99]
CABECALHO_SWEEP = ["alpha", "xi", "eta", "eta_classical", "gap_xi_eta", "gap_eta_classical"]
LIMIAR_PDE_CLASSICO = 1e-8
LIMIAR_STEFAN_CLASSICO = 1e-12


def formatar(valor: float) -> str:
    """Decimal com 15 algarismos significativos, sem dependência de locale."""
    if math.isnan(valor):
        return "nan"
    return format(float(valor), ".15g")


def _json_numero(valor: Optional[float]) -> Optional[float]:
    if valor is None or not math.isfinite(valor):
        return None
    return float(formatar(valor))


def _escrever_csv(linhas: list[list[str]], destino: Optional[str]) -> None:
    buffer = io.StringIO()
    escritor = csv.writer(buffer, lineterminator="\n")
    escritor.writerows(linhas)
    _emitir(buffer.getvalue(), destino)


def _emitir(texto: str, destino: Optional[str]) -> None:
    if destino:
        Path(destino).write_text(texto, encoding="utf-8", newline="\n")
        logger.info(f"Saída gravada em {destino}")
    else:
        sys.stdout.write(texto)


def _emitir_json(objeto: dict[str, Any], destino: Optional[str]) -> None:
    _emitir(json.dumps(objeto, indent=2, ensure_ascii=False) + "\n", destino)


# --------------------------------------------------------------------------
# configuração
# --------------------------------------------------------------------------
_CHAVES_RUNCONFIG = {
    "preset": "preset",
    "lam": "lam",
    "k_ratio": "k_ratio",
    "u": "U",
    "ste": "Ste",
    "alpha": "alpha",
    "alphas": "alphas",
    "flavor": "flavor",
    "output": "output",
    "grid_exponent": "grid_exponent",
    "nx": "nx",
    "nt": "nt",
    "t_max": "t_max",
    "y_max": "y_max",
    "tol_residual": "tol_residual",
    "pde_threshold": "pde_threshold",
    "stefan_threshold": "stefan_threshold",
}


def carregar_run_config(args: argparse.Namespace) -> RunConfig:
    """Arquivo JSON de ``--config`` sobreposto pelas flags informadas."""
    dados: dict[str, Any] = {}
    if getattr(args, "config", None):
        dados = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for flag, campo in _CHAVES_RUNCONFIG.items():
        valor = getattr(args, flag, None)
        if valor is not None:
            dados[campo] = valor
    return RunConfig.model_validate(dados)


def _lista_de_alphas(texto: str) -> list[float]:
    return [float(item) for item in texto.split(",") if item.strip()]


def _adicionar_parametros(parser: argparse.ArgumentParser, com_flavor: bool = True) -> None:
    parser.add_argument("--config", help="Arquivo JSON com os parâmetros (RunConfig)")
    parser.add_argument("--preset", choices=["test1", "test2", "test3", "test4"])
    parser.add_argument("--lam", type=float, help="lambda = lambda2/lambda1")
    parser.add_argument("--k-ratio", dest="k_ratio", type=float, help="k2/k1")
    parser.add_argument("--u", type=float, help="U = U_0/|U_i|")
    parser.add_argument("--ste", type=float, help="Número de Stefan")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--output", "-o")
    if com_flavor:
        parser.add_argument("--flavor", choices=["caputo", "rl", "classical"])


def construir_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstefan",
        description="Problemas de Stefan fracionários de duas fases via funções de Wright",
    )
    comandos = parser.add_subparsers(dest="comando", required=True)

    p_wright = comandos.add_parser("wright", help="Avalia W(x; rho; beta)")
    p_wright.add_argument("--x", type=float)
    p_wright.add_argument("--rho", type=float, required=True)
    p_wright.add_argument("--beta", type=float, required=True)
    p_wright.add_argument("--x-min", dest="x_min", type=float)
    p_wright.add_argument("--x-max", dest="x_max", type=float)
    p_wright.add_argument("--rows", type=int, default=101)
    p_wright.add_argument("--output", "-o")

    p_solve = comandos.add_parser("solve", help="Coeficiente da frente")
    _adicionar_parametros(p_solve)
    p_solve.add_argument("--tol-residual", dest="tol_residual", type=float)

    p_sweep = comandos.add_parser("sweep", help="xi_alpha, eta_alpha e eta_1 ao longo de alpha")
    _adicionar_parametros(p_sweep, com_flavor=False)
    p_sweep.add_argument("--alphas", type=_lista_de_alphas, help="Lista separada por vírgulas")

    p_field = comandos.add_parser("field", help="Campo de temperatura numa grade (y, tau)")
    _adicionar_parametros(p_field)
    p_field.add_argument("--nx", type=int)
    p_field.add_argument("--nt", type=int)
    p_field.add_argument("--t-max", dest="t_max", type=float)
    p_field.add_argument("--y-max", dest="y_max", type=float)

    p_verify = comandos.add_parser("verify", help="Resíduos das equações governantes")
    _adicionar_parametros(p_verify)
    p_verify.add_argument("--grid-exponent", dest="grid_exponent", type=int)
    p_verify.add_argument("--pde-threshold", dest="pde_threshold", type=float)
    p_verify.add_argument("--stefan-threshold", dest="stefan_threshold", type=float)
    return parser


# --------------------------------------------------------------------------
# comandos
# --------------------------------------------------------------------------
def cmd_wright(args: argparse.Namespace) -> int:
    if args.x is not None:
        a = WrightArgs(x=args.x, rho=args.rho, beta=args.beta)
        _emitir(formatar(wright(a)) + "\n", args.output)
        return 0
    if args.x_min is None or args.x_max is None or args.rows < 1:
        raise GridError("Informe --x ou o intervalo --x-min/--x-max com --rows >= 1")
    xs = np.linspace(args.x_min, args.x_max, args.rows)
    valores = wright(xs, args.rho, args.beta)
    linhas = [["x", "value"]] + [[formatar(x), formatar(v)] for x, v in zip(xs, valores)]
    _escrever_csv(linhas, args.output)
    return 0


def _cfg_para(run: RunConfig):
    alpha = run.alpha if run.alpha is not None else (1.0 if run.flavor == "classical" else None)
    return run.dimensionless(alpha)


def cmd_solve(run: RunConfig) -> int:
    cfg = _cfg_para(run)
    coef = solve_front(cfg, run.flavor, tol_residuo=run.tol_residual)
    _emitir_json(
        {
            "flavor": coef.flavor,
            "alpha": _json_numero(cfg.alpha),
            "coefficient": _json_numero(coef.value),
            "residual": _json_numero(coef.residual),
            "iterations": coef.iterations,
            "roots_found": coef.roots_found,
            "bracket": [_json_numero(coef.bracket_lo), _json_numero(coef.bracket_hi)],
        },
        run.output,
    )
    return 0


def cmd_sweep(run: RunConfig) -> int:
    alphas = run.alphas or ALPHAS_PADRAO
    cfg_base = run.dimensionless(alphas[0])
    linhas = alpha_sweep(cfg_base, alphas)
    tabela = [CABECALHO_SWEEP] + [
        [formatar(getattr(linha, campo)) for campo in CABECALHO_SWEEP] for linha in linhas
    ]
    _escrever_csv(tabela, run.output)
    falhas = [linha.alpha for linha in linhas if linha.falhou]
    if falhas:
        logger.error(f"Linhas com falha: alpha = {falhas}")
        return 3
    return 0


def campo_de_temperatura(run: RunConfig) -> GridField:
    """Resolve a frente e amostra o campo em [0, y_max] x (0, t_max]."""
    cfg = _cfg_para(run)
    sol = solution(cfg, run.flavor)
    y = np.linspace(0.0, run.y_max, run.nx)
    tau = run.t_max * np.arange(1, run.nt + 1) / run.nt
    frente = sol.s(tau)
    with ThreadPoolExecutor(max_workers=CONFIGURACAO.threads) as executor:
        linhas = list(executor.map(lambda t: sol.temperature(y, t), tau))
    return GridField(
        flavor=run.flavor,
        alpha=sol.alpha,
        y=y,
        tau=tau,
        u=np.vstack(linhas),
        front=frente,
        u_front=np.asarray(sol.temperature(frente, tau), dtype=float),
    )


def cmd_field(run: RunConfig) -> int:
    if not run.output:
        raise GridError("O comando field exige --output")
    campo = campo_de_temperatura(run)
    grade = [["y", "tau", "u"]]
    for j, t in enumerate(campo.tau):
        for i, y in enumerate(campo.y):
            grade.append([formatar(y), formatar(t), formatar(campo.u[j, i])])
    _escrever_csv(grade, run.output)
    destino = Path(run.output)
    frente = destino.with_name(f"{destino.stem}_front.csv")
    _escrever_csv(
        [["tau", "front", "u"]]
        + [
            [formatar(t), formatar(s), formatar(u)]
            for t, s, u in zip(campo.tau, campo.front, campo.u_front)
        ],
        str(frente),
    )
    return 0


def relatorio_de_verificacao(run: RunConfig) -> dict[str, Any]:
    cfg = _cfg_para(run)
    sol = solution(cfg, run.flavor)
    classico = run.flavor == "classical" or sol.alpha == 1.0
    limiar_pde = min(run.pde_threshold, LIMIAR_PDE_CLASSICO) if classico else run.pde_threshold
    limiar_stefan = (
        min(run.stefan_threshold, LIMIAR_STEFAN_CLASSICO) if classico else run.stefan_threshold
    )

    relatorio: dict[str, Any] = {
        "flavor": run.flavor,
        "alpha": _json_numero(sol.alpha),
        "coefficient": _json_numero(sol.coef),
        "pde": {},
    }
    aprovado = True
    for fase in (1, 2):
        try:
            r = pde_residual(sol, fase, expoente_grade=run.grid_exponent)
            passou = r.norm_inf <= limiar_pde
            relatorio["pde"][f"phase{fase}"] = {
                "norm_inf": _json_numero(r.norm_inf),
                "grid_resolution": r.grid_resolution,
                "threshold": limiar_pde,
                "passed": passou,
            }
        except GridError as erro:
            passou = False
            relatorio["pde"][f"phase{fase}"] = {
                "norm_inf": None,
                "error": str(erro),
                "threshold": limiar_pde,
                "passed": False,
            }
        aprovado &= passou

    residuo_stefan = stefan_condition_residual(sol)
    passou = abs(residuo_stefan) <= limiar_stefan
    relatorio["stefan_condition"] = {
        "residual": _json_numero(residuo_stefan),
        "threshold": limiar_stefan,
        "passed": passou,
    }
    aprovado &= passou

    if run.flavor == "rl" and cfg.alpha < 1.0:
        depois, traco = limit_interchange_gap(cfg, sol.front_coef)
        relatorio["limit_interchange"] = {
            "limit_after_derivative": _json_numero(depois),
            "derivative_of_trace": _json_numero(traco),
            "relative_gap": _json_numero(abs(depois - traco) / abs(depois)),
        }
    relatorio["passed"] = aprovado
    return relatorio


def cmd_verify(run: RunConfig) -> int:
    relatorio = relatorio_de_verificacao(run)
    _emitir_json(relatorio, run.output)
    if not relatorio["passed"]:
        raise VerificationFailedError("Verificação reprovada em pelo menos um limiar")
    return 0


_COMANDOS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "field": cmd_field,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = construir_parser().parse_args(argv)
    try:
        if args.comando == "wright":
            return cmd_wright(args)
        return _COMANDOS[args.comando](carregar_run_config(args))
    except FracStefanError as erro:
        logger.error(str(erro))
        return erro.codigo_saida
    except (ValidationError, ValueError, OSError) as erro:
        logger.error(str(erro))
        return 2

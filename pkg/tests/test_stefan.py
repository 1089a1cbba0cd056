import math
from functools import lru_cache

import numpy as np
import pytest
from pydantic import ValidationError

from fracstefan.estrutura_de_dados import DimensionlessConfig, PhaseConfig, PRESETS_DE_TESTE
from fracstefan.exceptions import DegenerateError, DomainError, NoRootError
from fracstefan.specialfn import corte_relativo, erf, erfc, gamma
from fracstefan.stefan import (
    caputo_front_residual,
    caputo_solution,
    dimensional_solution,
    f1,
    f2,
    fixed_point_map,
    g1,
    g2,
    mu_alpha,
    neumann_residual,
    neumann_solution,
    rl_front_residual,
    rl_front_residual_g,
    rl_solution,
    solution,
    solve_front,
    solve_front_dim,
    subdiffusion_coefficients,
    to_dimensionless,
)
from tests.config import ALPHAS_DISTINCAO, ALPHAS_UNICIDADE, PRESETS, SIMETRICAS

GAUSSIANA_EM_UM = math.exp(-0.25) / math.sqrt(math.pi)


def cfg_de(preset: str, alpha: float) -> DimensionlessConfig:
    return DimensionlessConfig(**PRESETS[preset], alpha=alpha)


@lru_cache(maxsize=None)
def raiz(preset: str, alpha: float, flavor: str) -> float:
    return solve_front(cfg_de(preset, alpha), flavor).value


def topo_da_janela(alpha: float, lam: float) -> float:
    return min(30.0, corte_relativo(alpha / 2.0) / (2.0 * max(1.0, 1.0 / lam)))


def fase_exemplo(**sobrepor) -> PhaseConfig:
    base = dict(
        k1=1.0, k2=2.0, rho_mass=1.0, c1=1.0, c2=1.0, latent_l=2.0, U_i=-1.0, U_m=0.0, U_0=1.0, alpha=0.7
    )
    return PhaseConfig(**{**base, **sobrepor})


class TestPresets:
    def test_tabela(self):
        assert PRESETS_DE_TESTE == PRESETS


class TestFuncoesDaFrente:
    def test_f2_explode_na_origem(self):
        assert f2(1e-8, 0.5) > 1e6

    def test_f1_perto_do_classico(self):
        assert f1(1.0, 0.999) == pytest.approx(GAUSSIANA_EM_UM / erfc(0.5), abs=2e-3)

    def test_g2_perto_do_classico(self):
        alpha = 0.999
        assert g2(1.0, alpha) * alpha / 2.0 == pytest.approx(GAUSSIANA_EM_UM / erf(0.5), abs=2e-3)

    @pytest.mark.parametrize("alpha", [0.3, 0.6, 0.9])
    def test_g1_limitada(self, alpha):
        x = np.geomspace(0.01, 10.0, 50)
        valores = g1(x, alpha)
        assert np.all(valores > 0.0)
        assert np.all(valores < 1.0 / gamma(1.0 + alpha / 2.0))

    @pytest.mark.parametrize("funcao", [f1, f2, g1, g2])
    def test_valores_positivos(self, funcao):
        x = np.array([0.1, 0.8, 1.5, 3.0])
        assert np.all(funcao(x, 0.5) > 0.0)
        assert isinstance(funcao(0.8, 0.5), float)

    def test_denominador_degenerado(self):
        with pytest.raises(DegenerateError):
            f2(1e-20, 0.5)

    @pytest.mark.parametrize("x, alpha", [(0.0, 0.5), (-1.0, 0.5), (1.0, 0.0), (1.0, 1.2)])
    def test_dominio(self, x, alpha):
        with pytest.raises(DomainError):
            f1(x, alpha)


class TestResiduos:
    @pytest.mark.parametrize("residuo", [caputo_front_residual, rl_front_residual])
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_sinais_nas_pontas(self, residuo, preset):
        cfg = cfg_de(preset, 0.5)
        assert residuo(1e-6, cfg) > 1e3
        assert residuo(0.9 * topo_da_janela(0.5, cfg.lam), cfg) < 0.0

    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_neumann_nas_pontas(self, preset):
        cfg = cfg_de(preset, 1.0)
        assert neumann_residual(1e-6, cfg) > 1e3
        assert neumann_residual(5.0, cfg) < 0.0

    @pytest.mark.parametrize("residuo", [caputo_front_residual, rl_front_residual])
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_alpha_um_e_neumann(self, residuo, preset):
        x = np.linspace(0.1, 2.0, 39)
        cfg = cfg_de(preset, 1.0)
        assert np.max(np.abs(residuo(x, cfg) - neumann_residual(x, cfg))) <= 1e-9

    @pytest.mark.parametrize("residuo", [caputo_front_residual, rl_front_residual])
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_colapso_pontual(self, residuo, preset):
        x = np.linspace(0.1, 2.0, 39)
        diferenca = residuo(x, cfg_de(preset, 0.9999)) - neumann_residual(x, cfg_de(preset, 1.0))
        assert np.max(np.abs(diferenca)) <= 5e-3

    @pytest.mark.parametrize("alpha", [0.3, 0.7])
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_forma_g_e_o_dobro(self, alpha, preset):
        cfg = cfg_de(preset, alpha)
        x = np.linspace(0.05, 2.0, 40)
        r = rl_front_residual(x, cfg)
        assert np.all(np.abs(rl_front_residual_g(x, cfg) - 2.0 * r) <= 1e-10 * (1.0 + np.abs(r)))

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", ALPHAS_UNICIDADE)
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_rl_estritamente_decrescente(self, alpha, preset):
        cfg = cfg_de(preset, alpha)
        grade = np.geomspace(1e-6, topo_da_janela(alpha, cfg.lam), 128)
        assert np.all(np.diff(rl_front_residual(grade, cfg)) < 0.0)

    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_neumann_estritamente_decrescente(self, preset):
        grade = np.geomspace(1e-6, 5.0, 128)
        assert np.all(np.diff(neumann_residual(grade, cfg_de(preset, 1.0))) < 0.0)

    def test_neumann_ignora_alpha(self):
        x = np.array([0.2, 0.7])
        assert np.array_equal(
            neumann_residual(x, cfg_de("test1", 0.3)), neumann_residual(x, cfg_de("test1", 1.0))
        )


class TestSolveFront:
    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", ALPHAS_UNICIDADE)
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_rl_unica(self, alpha, preset):
        coef = solve_front(cfg_de(preset, alpha), "rl")
        assert coef.roots_found == 1
        assert abs(coef.residual) <= 1e-10
        assert coef.bracket_lo <= coef.value <= coef.bracket_hi
        assert coef.bracket_hi - coef.bracket_lo < 1e-13

    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_classico(self, preset):
        cfg = cfg_de(preset, 1.0)
        coef = solve_front(cfg, "classical")
        assert coef.flavor == "classical"
        assert coef.roots_found == 1
        assert coef.iterations > 0
        assert abs(neumann_residual(coef.value, cfg)) <= 1e-10

    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_caputo_menor_raiz(self, preset):
        cfg = cfg_de(preset, 0.5)
        coef = solve_front(cfg, "caputo")
        assert coef.value > 0.0
        assert abs(caputo_front_residual(coef.value, cfg)) <= 1e-10
        abaixo = np.geomspace(1e-6, coef.bracket_lo, 64)[:-1]
        assert np.all(caputo_front_residual(abaixo, cfg) > 0.0)

    def test_sem_raiz_na_janela(self):
        with pytest.raises(NoRootError):
            solve_front(cfg_de("test1", 1.0), "classical", janela=(3.0, 4.0))

    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_colapso_em_alpha_um(self, preset):
        eta_1 = raiz(preset, 1.0, "classical")
        for flavor in ("caputo", "rl"):
            perto = abs(raiz(preset, 0.9999, flavor) - eta_1)
            longe = abs(raiz(preset, 0.999, flavor) - eta_1)
            assert perto <= 5e-3
            assert longe > perto

    @pytest.mark.parametrize("alpha", ALPHAS_DISTINCAO)
    @pytest.mark.parametrize("parametros", SIMETRICAS)
    def test_distintas_com_lambda_um(self, alpha, parametros):
        cfg = DimensionlessConfig(**parametros, alpha=alpha)
        xi = solve_front(cfg, "caputo").value
        eta = solve_front(cfg, "rl").value
        assert abs(xi - eta) > 1e-6

    @pytest.mark.parametrize("flavor, alpha", [("rl", 0.6), ("caputo", 0.6), ("classical", 1.0)])
    def test_ponto_fixo(self, flavor, alpha):
        cfg = cfg_de("test2", alpha)
        valor = raiz("test2", alpha, flavor)
        assert fixed_point_map(valor, cfg, flavor) == pytest.approx(valor, abs=1e-10)
        assert fixed_point_map(np.array([valor]), cfg, flavor).shape == (1,)


class TestFormaDimensional:
    def test_exemplo_de_reducao(self):
        cfg = to_dimensionless(fase_exemplo())
        assert cfg.lam == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert (cfg.k_ratio, cfg.U, cfg.Ste, cfg.alpha) == (2.0, 1.0, 0.5, 0.7)

    def test_reducao_com_temperatura_de_fusao(self):
        cfg = to_dimensionless(fase_exemplo(U_i=10.0, U_m=20.0, U_0=35.0))
        assert cfg.U == pytest.approx(1.5)
        assert cfg.Ste == pytest.approx(5.0)

    def test_mu_alpha(self):
        assert mu_alpha(fase_exemplo(alpha=1.0, x0=3.0)) == 1.0
        p = fase_exemplo(x0=1.0)
        assert p.lam1 == 1.0
        assert mu_alpha(p) == 1.0
        assert mu_alpha(fase_exemplo(x0=2.0)) == pytest.approx(4.0**0.3, rel=1e-14)

    def test_coeficientes_de_subdifusao(self):
        p = fase_exemplo(x0=2.0)
        s = subdiffusion_coefficients(p)
        mu = mu_alpha(p)
        assert s.lam_a1 == pytest.approx(p.lam1 * math.sqrt(mu), rel=1e-14)
        assert s.k_a2 / s.k_a1 == pytest.approx(p.k2 / p.k1, rel=1e-14)
        assert s.lam_a1 / s.lam_a2 == pytest.approx(p.lam1 / p.lam2, rel=1e-14)

    def test_difusividades(self):
        p = fase_exemplo(k1=3.0, rho_mass=2.0, c1=0.5)
        assert p.lam1**2 == pytest.approx(p.k1 / (p.rho_mass * p.c1), rel=1e-12)

    @pytest.mark.parametrize(
        "temperaturas", [dict(U_i=0.0, U_m=0.0, U_0=1.0), dict(U_i=-1.0, U_m=2.0, U_0=1.0)]
    )
    def test_temperaturas_invalidas(self, temperaturas):
        with pytest.raises(ValidationError):
            fase_exemplo(**temperaturas)

    @pytest.mark.parametrize("flavor", ["caputo", "rl", "classical"])
    @pytest.mark.parametrize(
        "sobrepor",
        [dict(x0=2.5), dict(x0=0.7, U_i=10.0, U_m=20.0, U_0=35.0, c1=3.0, latent_l=40.0)],
    )
    def test_equivalencia_adimensional(self, flavor, sobrepor):
        p = fase_exemplo(**sobrepor)
        dimensional = solve_front_dim(p, flavor).value
        adimensional = solve_front(to_dimensionless(p), flavor).value
        assert dimensional == pytest.approx(adimensional, abs=1e-10)

    def test_solucao_dimensional(self):
        p = fase_exemplo(x0=2.5, U_i=10.0, U_m=20.0, U_0=35.0)
        coef = solve_front_dim(p, "rl")
        sol = dimensional_solution(p, coef)
        s = subdiffusion_coefficients(p)
        t = 1.7
        assert sol.s(t) == pytest.approx(2.0 * coef.value * s.lam_a1 * t ** (p.alpha / 2.0), rel=1e-14)
        assert sol.u1(sol.s(t), t) == pytest.approx(p.U_m, abs=1e-10)
        assert sol.u2(sol.s(t), t) == pytest.approx(p.U_m, abs=1e-10)
        assert sol.u2(0.0, t) == pytest.approx(p.U_0, abs=1e-12)


@pytest.fixture(params=[("caputo", 0.6), ("rl", 0.6), ("classical", 1.0)], ids=["caputo", "rl", "classical"])
def sabor_alpha(request):
    return request.param


class TestSolucoes:
    @pytest.mark.parametrize("preset", list(PRESETS))
    def test_fronteira_e_interface(self, sabor_alpha, preset):
        flavor, alpha = sabor_alpha
        cfg = cfg_de(preset, alpha)
        sol = solution(cfg, flavor)
        for t in (0.1, 1.0, 3.0):
            s = sol.s(t)
            assert sol.u2(0.0, t) == pytest.approx(cfg.U, abs=1e-10)
            assert sol.u1(s, t) == pytest.approx(0.0, abs=1e-10)
            assert sol.u2(s, t) == pytest.approx(0.0, abs=1e-10)

    def test_frente(self, sabor_alpha):
        flavor, alpha = sabor_alpha
        sol = solution(cfg_de("test1", alpha), flavor)
        t = np.linspace(0.0, 2.0, 21)
        frente = sol.s(t)
        assert frente[0] == 0.0
        assert np.all(np.diff(frente) > 0.0)
        assert sol.s(1.0) == pytest.approx(2.0 * sol.coef, rel=1e-15)

    def test_perfis(self, sabor_alpha):
        flavor, alpha = sabor_alpha
        cfg = cfg_de("test3", alpha)
        sol = solution(cfg, flavor)
        t = 1.0
        s = sol.s(t)
        depois = sol.u1(np.linspace(s, 10.0 * s, 50), t)
        assert np.all(np.diff(depois) <= 0.0)
        assert np.all(depois >= -1.0)
        antes = sol.u2(np.linspace(0.0, s, 50)[1:-1], t)
        assert np.all((antes > 0.0) & (antes < cfg.U))

    def test_limites_iniciais(self, sabor_alpha):
        flavor, alpha = sabor_alpha
        sol = solution(cfg_de("test2", alpha), flavor)
        assert sol.u1(1.0, 1e-8) == pytest.approx(sol.initial_limit_1, abs=1e-12)
        assert sol.initial_limit_1 == -1.0
        assert sol.u2(1.0, 1e-8) == pytest.approx(sol.initial_limit_2, abs=1e-12)

    @pytest.mark.parametrize("c", [0.5, 2.0])
    def test_auto_similaridade(self, sabor_alpha, c):
        flavor, alpha = sabor_alpha
        sol = solution(cfg_de("test4", alpha), flavor)
        x = np.array([0.05, 0.3, 0.9, 2.0])
        assert np.all(
            np.abs(sol.temperature(c * x, c ** (2.0 / sol.alpha) * 1.0) - sol.temperature(x, 1.0)) <= 1e-10
        )

    def test_temperatura_por_fase(self, sabor_alpha):
        flavor, alpha = sabor_alpha
        sol = solution(cfg_de("test1", alpha), flavor)
        s = sol.s(1.0)
        campo = sol.temperature(np.array([0.5 * s, 2.0 * s]), 1.0)
        assert campo[0] == pytest.approx(sol.u2(0.5 * s, 1.0), abs=0.0)
        assert campo[1] == pytest.approx(sol.u1(2.0 * s, 1.0), abs=0.0)

    def test_dominio_dos_avaliadores(self, sabor_alpha):
        flavor, alpha = sabor_alpha
        sol = solution(cfg_de("test1", alpha), flavor)
        with pytest.raises(DomainError):
            sol.u1(1.0, 0.0)
        with pytest.raises(DomainError):
            sol.u2(-0.1, 1.0)
        with pytest.raises(DomainError):
            sol.s(-1.0)

    def test_coeficiente_de_outro_sabor(self):
        cfg = cfg_de("test1", 0.5)
        coef = solve_front(cfg, "caputo")
        with pytest.raises(DomainError):
            rl_solution(cfg, coef)
        assert caputo_solution(cfg, coef).flavor == "caputo"

    @pytest.mark.parametrize("flavor", ["caputo", "rl"])
    def test_convergencia_pontual(self, flavor):
        classica = neumann_solution(cfg_de("test2", 1.0), solve_front(cfg_de("test2", 1.0), "classical"))
        fracionaria = solution(cfg_de("test2", 0.999), flavor)
        assert abs(fracionaria.u2(0.3, 1.0) - classica.u2(0.3, 1.0)) <= 1e-2

    def test_distintas_com_lambda_um(self):
        cfg = DimensionlessConfig(**SIMETRICAS[0], alpha=0.5)
        assert abs(solution(cfg, "caputo").s(1.0) - solution(cfg, "rl").s(1.0)) > 1e-6

import math
from typing import Literal, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator,
)
from typing_extensions import Annotated, Self

Sabor = Literal["caputo", "rl", "classical"]
Fase = Literal[1, 2]

Alpha = Annotated[float, Field(gt=0.0, le=1.0)]


class WrightArgs(BaseModel):
    """Argumentos da função de Wright W(x; rho; beta).

    Attributes:
        x: Argumento real (adimensional).
        rho: Segundo parâmetro, rho > -1 (domínio da série).
        beta: Terceiro parâmetro, real.
    """

    model_config = ConfigDict(frozen=True)

    x: float
    rho: float = Field(gt=-1.0)
    beta: float


class SampledFn(BaseModel):
    """Função do tempo amostrada numa grade crescente que começa em t = 0.

    As matrizes são copiadas e marcadas como somente leitura na construção.

    Attributes:
        t_grid: Nós temporais estritamente crescentes, t_grid[0] = 0.
        values: Amostras finitas da função nesses nós.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t_grid: np.ndarray
    values: np.ndarray

    @field_validator("t_grid", "values", mode="before")
    @classmethod
    def converter_para_array(cls, valor) -> np.ndarray:
        array = np.array(valor, dtype=float).ravel()
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validar_grade(self) -> Self:
        if self.t_grid.size < 3:
            raise ValueError("A grade precisa de pelo menos 3 nós.")
        if self.t_grid.size != self.values.size:
            raise ValueError("t_grid e values devem ter o mesmo tamanho.")
        if self.t_grid[0] != 0.0:
            raise ValueError("A grade deve começar em t = 0.")
        if np.any(np.diff(self.t_grid) <= 0.0):
            raise ValueError("A grade deve ser estritamente crescente.")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("As amostras devem ser finitas.")
        return self

    @classmethod
    def de_funcao(cls, f, t_grid) -> "SampledFn":
        """Amostra ``f`` (vetorizada) nos nós de ``t_grid``."""
        t = np.asarray(t_grid, dtype=float)
        return cls(t_grid=t, values=np.broadcast_to(f(t), t.shape))

    @classmethod
    def uniforme(cls, f, t_max: float, nos: int) -> "SampledFn":
        """Amostra ``f`` numa grade uniforme de ``nos`` nós em [0, t_max]."""
        return cls.de_funcao(f, np.linspace(0.0, t_max, nos))

    @property
    def t_max(self) -> float:
        return float(self.t_grid[-1])


class PhaseConfig(BaseModel):
    """Instância dimensional do problema de duas fases.

    Attributes:
        k1, k2: Condutividades térmicas [m·X/(T·t³)].
        rho_mass: Densidade [m/X³].
        c1, c2: Calores específicos [X²/(T·t²)].
        latent_l: Calor latente por unidade de massa [X²/t²].
        U_i, U_m, U_0: Temperaturas inicial, de fusão e de fronteira [T].
        alpha: Ordem fracionária em (0, 1].
        x0: Comprimento característico [X], usado em mu_alpha.
    """

    model_config = ConfigDict(frozen=True)

    k1: PositiveFloat
    k2: PositiveFloat
    rho_mass: PositiveFloat
    c1: PositiveFloat
    c2: PositiveFloat
    latent_l: PositiveFloat
    U_i: float
    U_m: float
    U_0: float
    alpha: Alpha
    x0: PositiveFloat = 1.0

    @model_validator(mode="after")
    def validar_temperaturas(self) -> Self:
        if not (self.U_i < self.U_m < self.U_0):
            raise ValueError("As temperaturas devem satisfazer U_i < U_m < U_0.")
        return self

    @property
    def lam1(self) -> float:
        return math.sqrt(self.k1 / (self.rho_mass * self.c1))

    @property
    def lam2(self) -> float:
        return math.sqrt(self.k2 / (self.rho_mass * self.c2))


class SubdiffusionCoefficients(BaseModel):
    """lambda_alpha_i = lambda_i sqrt(mu_alpha) e k_alpha_i = k_i mu_alpha."""

    model_config = ConfigDict(frozen=True)

    lam_a1: PositiveFloat
    lam_a2: PositiveFloat
    k_a1: PositiveFloat
    k_a2: PositiveFloat


class DimensionlessConfig(BaseModel):
    """Instância adimensional (λ = λ2/λ1, k2/k1, U = U_0/|U_i|, Ste, α).

    Implica U_i = -1, U_m = 0 e U_0 = U.
    """

    model_config = ConfigDict(frozen=True)

    lam: PositiveFloat
    k_ratio: PositiveFloat
    U: PositiveFloat
    Ste: PositiveFloat
    alpha: Alpha

    @property
    def lam_tilde(self) -> float:
        """Razão λ1/λ2 usada nas equações da frente."""
        return 1.0 / self.lam

    def com_alpha(self, alpha: float) -> "DimensionlessConfig":
        return DimensionlessConfig(**{**self.model_dump(), "alpha": alpha})


PRESETS_DE_TESTE: dict[str, dict[str, float]] = {
    "test1": {"lam": 0.5, "k_ratio": 0.5, "U": 1.0, "Ste": 0.5},
    "test2": {"lam": 2.0, "k_ratio": 2.0, "U": 1.0, "Ste": 0.5},
    "test3": {"lam": 0.5, "k_ratio": 0.5, "U": 1.0, "Ste": 1.2},
    "test4": {"lam": 2.0, "k_ratio": 2.0, "U": 1.0, "Ste": 1.2},
}


class FrontCoefficient(BaseModel):
    """Raiz de uma equação da frente com o relatório da busca.

    Attributes:
        value: A raiz (ξ_α, η_α ou η_1).
        bracket_lo, bracket_hi: Intervalo final da bissecção.
        residual: Valor da equação na raiz.
        iterations: Iterações de bissecção.
        roots_found: Trocas de sinal detectadas na varredura.
        flavor: Equação resolvida.
    """

    model_config = ConfigDict(frozen=True)

    value: PositiveFloat
    bracket_lo: float
    bracket_hi: float
    residual: float
    iterations: int = Field(ge=0)
    roots_found: PositiveInt
    flavor: Sabor

    @model_validator(mode="after")
    def validar_intervalo(self) -> Self:
        if not (self.bracket_lo <= self.value <= self.bracket_hi):
            raise ValueError("O intervalo final deve conter a raiz.")
        return self


class ResidualReport(BaseModel):
    """Resíduos pontuais de uma equação governante."""

    points: list[tuple[float, float]]
    residuals: list[float]
    norm_inf: float
    grid_resolution: int
    phase: Fase
    flavor: Sabor

    @field_validator("residuals")
    @classmethod
    def validar_finitos(cls, valor: list[float]) -> list[float]:
        if not all(math.isfinite(r) for r in valor):
            raise ValueError("Resíduos devem ser finitos.")
        return valor


class GridField(BaseModel):
    """Amostragem retangular (y, τ) de um campo de temperatura com a curva da frente."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    flavor: Sabor
    alpha: Alpha
    y: np.ndarray
    tau: np.ndarray
    u: np.ndarray  # shape (len(tau), len(y))
    front: np.ndarray  # s̃(τ) nos nós de tau
    u_front: np.ndarray  # u no ponto da frente, em cada τ


class SweepRow(BaseModel):
    """Linha da varredura em α."""

    alpha: float
    xi: float = math.nan
    eta: float = math.nan
    eta_classical: float = math.nan
    gap_xi_eta: float = math.nan
    gap_eta_classical: float = math.nan
    falhou: bool = False


class RunConfig(BaseModel):
    """Parâmetros de execução da CLI (flags e/ou arquivo JSON).

    Parâmetros explícitos (lam, k_ratio, U, Ste) sobrepõem o preset.
    """

    preset: Optional[Literal["test1", "test2", "test3", "test4"]] = None
    lam: Optional[PositiveFloat] = None
    k_ratio: Optional[PositiveFloat] = None
    U: Optional[PositiveFloat] = None
    Ste: Optional[PositiveFloat] = None
    alpha: Optional[Alpha] = None
    alphas: Optional[list[Alpha]] = None
    flavor: Sabor = "rl"
    output: Optional[str] = None
    grid_exponent: int = Field(default=11, ge=3, le=20)
    nx: PositiveInt = 41
    nt: PositiveInt = 41
    t_max: PositiveFloat = 1.0
    y_max: PositiveFloat = 3.0
    tol_residual: PositiveFloat = 1e-10
    pde_threshold: PositiveFloat = 1e-3
    stefan_threshold: PositiveFloat = 1e-9

    def dimensionless(self, alpha: Optional[float] = None) -> DimensionlessConfig:
        """Expande preset + sobreposições numa DimensionlessConfig.

        Raises:
            ValueError: Se faltar algum dos quatro parâmetros ou α.
        """
        base = dict(PRESETS_DE_TESTE[self.preset]) if self.preset else {}
        for nome in ("lam", "k_ratio", "U", "Ste"):
            valor = getattr(self, nome)
            if valor is not None:
                base[nome] = valor
        faltando = [n for n in ("lam", "k_ratio", "U", "Ste") if n not in base]
        if faltando:
            raise ValueError(f"Parâmetros ausentes (use --preset): {', '.join(faltando)}")
        a = alpha if alpha is not None else self.alpha
        if a is None:
            raise ValueError("Informe --alpha.")
        return DimensionlessConfig(**base, alpha=a)

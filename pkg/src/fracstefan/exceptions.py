__all__ = [
    "FracStefanError",
    "DomainError",
    "PoleError",
    "DegenerateError",
    "GridError",
    "RegionError",
    "NonConvergenceError",
    "NoRootError",
    "VerificationFailedError",
]


class FracStefanError(Exception):
    codigo_saida = 1


class DomainError(FracStefanError, ValueError):
    codigo_saida = 2


class PoleError(DomainError):
    pass


class DegenerateError(DomainError):
    pass


class GridError(DomainError):
    pass


class RegionError(DomainError):
    pass


class NonConvergenceError(FracStefanError):
    codigo_saida = 3


class NoRootError(FracStefanError):
    codigo_saida = 3


class VerificationFailedError(FracStefanError):
    codigo_saida = 4

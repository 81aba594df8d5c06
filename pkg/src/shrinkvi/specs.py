"""Model specifications and hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError

LINKS = ("lm", "probit")
PRIORS = ("ridge", "lasso", "horseshoe")
FAMILIES = ("correlated", "independent")
ALGORITHMS = ("gibbs", "cavi", "svi")


@dataclass(frozen=True)
class PriorHyper:
    """Gamma hyperparameters for the global precisions and the intercept variance."""

    a_lambda: float = 0.01
    b_lambda: float = 0.01
    a_tau: float = 0.01
    b_tau: float = 0.01
    var_b0: float = 1e6

    def __post_init__(self):
        for name in ("a_lambda", "b_lambda", "a_tau", "b_tau", "var_b0"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class LmModelSpec:
    """Prior and variational-family choice for a single fit.

    coeff_family applies to the variational engines only; Gibbs ignores it.
    fixed_lambda / fixed_tau replace the corresponding updates with a point
    mass, which makes conjugate closed forms available for testing.
    """

    prior: str = "ridge"
    coeff_family: str = "correlated"
    hyper: PriorHyper = field(default_factory=PriorHyper)
    fixed_lambda: float | None = None
    fixed_tau: float | None = None

    def __post_init__(self):
        if self.prior not in PRIORS:
            raise DomainError(f"prior must be one of {PRIORS}, got {self.prior!r}")
        if self.coeff_family not in FAMILIES:
            raise DomainError(f"coeff_family must be one of {FAMILIES}, got {self.coeff_family!r}")
        for name in ("fixed_lambda", "fixed_tau"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise DomainError(f"{name} must be strictly positive when given")


@dataclass(frozen=True)
class ModelSpec:
    """A cell of the link x prior x algorithm grid, as named on the CLI."""

    link: str
    prior: str
    algorithm: str
    coeff_family: str = "correlated"

    def __post_init__(self):
        if self.link not in LINKS:
            raise DomainError(f"link must be one of {LINKS}, got {self.link!r}")
        if self.prior not in PRIORS:
            raise DomainError(f"prior must be one of {PRIORS}, got {self.prior!r}")
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.coeff_family not in FAMILIES:
            raise DomainError(f"coeff_family must be one of {FAMILIES}, got {self.coeff_family!r}")

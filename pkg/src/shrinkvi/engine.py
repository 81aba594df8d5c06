"""Optimization scaffolding: step-size schedules, minibatching, convergence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "StepSchedule",
    "ElboTrace",
    "step_size",
    "schedule_satisfies_robbins_monro",
    "minibatch_indices",
    "check_converged",
]

# |reference ELBO| below this is treated as zero and compared absolutely
_ZERO_GUARD = 1e-300


@dataclass(frozen=True)
class StepSchedule:
    """Step-size schedule: constant rho, or rho_t = (t + omega)^(-kappa).

    The decaying form with kappa in (0.5, 1] satisfies the stochastic-
    approximation conditions sum(rho_t) = inf, sum(rho_t^2) < inf; a
    constant rate does not, trading the convergence guarantee for
    simplicity.
    """

    kind: str = "constant"
    rho: float = 0.01
    omega: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.kind == "constant":
            if not (0.0 < self.rho <= 1.0):
                raise DomainError(f"constant rho must be in (0, 1], got {self.rho}")
        elif self.kind == "decaying":
            if self.omega < 0.0:
                raise DomainError(f"delay omega must be >= 0, got {self.omega}")
            if not (0.5 < self.kappa <= 1.0):
                raise DomainError(f"forgetting rate kappa must be in (0.5, 1], got {self.kappa}")
        else:
            raise DomainError(f"unknown schedule kind {self.kind!r}")

    @staticmethod
    def constant(rho: float) -> "StepSchedule":
        return StepSchedule(kind="constant", rho=rho)

    @staticmethod
    def decaying(omega: float, kappa: float) -> "StepSchedule":
        return StepSchedule(kind="decaying", omega=omega, kappa=kappa)


@dataclass
class ElboTrace:
    """ELBO values recorded per iteration, plus the iteration convergence hit."""

    values: list = field(default_factory=list)
    converged_at: int | None = None

    def append(self, value: float):
        self.values.append(float(value))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def step_size(schedule: StepSchedule, t: int) -> float:
    """Step size at iteration t >= 1."""
    if t < 1:
        raise DomainError(f"iteration index must be >= 1, got {t}")
    if schedule.kind == "constant":
        return schedule.rho
    return float((t + schedule.omega) ** (-schedule.kappa))


def schedule_satisfies_robbins_monro(schedule: StepSchedule) -> bool:
    """True iff the schedule meets sum(rho)=inf and sum(rho^2)<inf."""
    return schedule.kind == "decaying"


def minibatch_indices(n_total: int, batch_size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of batch_size distinct indices from range(n_total)."""
    if not 1 <= batch_size <= n_total:
        raise DomainError(f"batch size must be in [1, {n_total}], got {batch_size}")
    return rng.choice(n_total, size=batch_size, replace=False)


def check_converged(trace: ElboTrace, rel_tol: float) -> bool:
    """Compare the latest ELBO against the value five iterations back."""
    if not rel_tol > 0.0:
        raise DomainError(f"rel_tol must be positive, got {rel_tol}")
    values = trace.values
    if len(values) < 6:
        return False
    current, past = values[-1], values[-6]
    if abs(past) < _ZERO_GUARD:
        return abs(current - past) < rel_tol
    return abs(current - past) / abs(past) < rel_tol

"""Fit result containers: variational factor records and Gibbs draws.

The variational result mirrors the nested structure the summaries and
prediction helpers consume: one record per parameter giving the optimal
distribution kind and its parameters, plus the ELBO trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class VariationalFit:
    b0: dict
    b: dict
    lam: dict
    elbo: np.ndarray
    tau: dict | None = None
    local_scales: list | None = None
    link: str = "lm"
    prior: str = "ridge"
    coeff_family: str = "correlated"
    algorithm: str = "cavi"
    converged: bool = False
    converged_at: int | None = None

    @property
    def n_coef(self) -> int:
        return len(self.b["mu"])

    def coef_mean(self) -> np.ndarray:
        return np.asarray(self.b["mu"], dtype=float)

    def coef_var(self) -> np.ndarray:
        """Marginal variances of the coefficient factor."""
        if "sigma_mat" in self.b:
            return np.diag(np.asarray(self.b["sigma_mat"], dtype=float)).copy()
        return np.asarray(self.b["var"], dtype=float)

    def coef_quad(self, x: np.ndarray) -> np.ndarray:
        """Var(x_n' b) per row of x."""
        if "sigma_mat" in self.b:
            sigma = np.asarray(self.b["sigma_mat"], dtype=float)
            return np.einsum("ij,jk,ik->i", x, sigma, x)
        return (x**2) @ np.asarray(self.b["var"], dtype=float)


@dataclass
class GibbsDraws:
    b0: np.ndarray
    b: np.ndarray
    tau: np.ndarray
    lam: np.ndarray
    local_scales: np.ndarray | None = None
    link: str = "lm"
    prior: str = "ridge"

    def __post_init__(self):
        if self.b.ndim != 2 or self.b.shape[0] != self.b0.size:
            raise DomainError("draw matrices have inconsistent shapes")

    @property
    def n_kept(self) -> int:
        return self.b0.size

    @property
    def n_coef(self) -> int:
        return self.b.shape[1]

    def coef_mean(self) -> np.ndarray:
        return self.b.mean(axis=0)

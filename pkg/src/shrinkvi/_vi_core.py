"""Internal building blocks for the variational fits.

Each factor stores enough to expose both moment and natural coordinates;
stochastic steps blend in natural coordinates and moments are refreshed
afterwards. A full-batch step with rho = 1 is exactly the coordinate
update, which keeps the stochastic and coordinate engines interchangeable.
"""

from __future__ import annotations

import numpy as np
from scipy import special
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import NumericalError

_LOG_2PI = np.log(2.0 * np.pi)


def gamma_entropy(shape: float, rate: float) -> float:
    return float(shape - np.log(rate) + special.gammaln(shape) + (1.0 - shape) * special.digamma(shape))


def gamma_cross_entropy(a0: float, b0: float, shape: float, rate: float) -> float:
    """E_q[log Gamma(x; a0, b0)] under q = Gamma(shape, rate)."""
    e_log = special.digamma(shape) - np.log(rate)
    return float(a0 * np.log(b0) - special.gammaln(a0) + (a0 - 1.0) * e_log - b0 * shape / rate)


def invgamma_entropy(shape: float, scale: float) -> float:
    return float(shape + np.log(scale) + special.gammaln(shape) - (1.0 + shape) * special.digamma(shape))


class ScalarNormalFactor:
    """Gaussian factor for the intercept."""

    def __init__(self, mu: float, prec: float):
        self.mu = float(mu)
        self.prec = float(prec)

    @property
    def var(self) -> float:
        return 1.0 / self.prec

    def step(self, eta1_target: float, prec_target: float, rho: float):
        eta1 = (1.0 - rho) * (self.prec * self.mu) + rho * eta1_target
        self.prec = (1.0 - rho) * self.prec + rho * prec_target
        self.mu = eta1 / self.prec

    def entropy(self) -> float:
        return 0.5 * (_LOG_2PI + 1.0 - np.log(self.prec))


class GammaFactor:
    """Gamma factor for a precision parameter; supports a fixed point mass."""

    def __init__(self, shape: float, rate: float, fixed: float | None = None):
        self.shape = float(shape)
        self.rate = float(rate)
        self.fixed = fixed

    @property
    def mean(self) -> float:
        if self.fixed is not None:
            return self.fixed
        return self.shape / self.rate

    @property
    def mean_log(self) -> float:
        if self.fixed is not None:
            return float(np.log(self.fixed))
        return float(special.digamma(self.shape)) - float(np.log(self.rate))

    def step(self, shape_target: float, rate_target: float, rho: float):
        if self.fixed is not None:
            return
        self.shape = (1.0 - rho) * self.shape + rho * shape_target
        self.rate = (1.0 - rho) * self.rate + rho * rate_target

    def elbo_terms(self, a0: float, b0: float) -> float:
        """Prior cross-entropy plus entropy; zero when fixed (a constant)."""
        if self.fixed is not None:
            return 0.0
        return gamma_cross_entropy(a0, b0, self.shape, self.rate) + gamma_entropy(self.shape, self.rate)

    def record(self) -> dict:
        if self.fixed is not None:
            return {"dist": "point", "value": self.fixed}
        return {"dist": "gamma", "shape": self.shape, "rate": self.rate}


class CoefFactor:
    """Gaussian factor for the coefficient block.

    Correlated family keeps a joint multivariate normal; independent family
    keeps per-coordinate normals. State is held as (eta1, precision) with
    moments refreshed after every change.
    """

    def __init__(self, n_coef: int, correlated: bool):
        self.correlated = correlated
        self.n_coef = n_coef
        self.mu = np.zeros(n_coef)
        if correlated:
            self.prec = np.eye(n_coef)
            self.sigma = np.eye(n_coef)
            self._logdet_sigma = 0.0
        else:
            self.prec_diag = np.ones(n_coef)

    # -- correlated family ------------------------------------------------
    def step_correlated(self, eta1_target: np.ndarray, prec_target: np.ndarray, rho: float,
                        iteration: int | None = None):
        eta1 = (1.0 - rho) * (self.prec @ self.mu) + rho * eta1_target
        self.prec = (1.0 - rho) * self.prec + rho * prec_target
        self._refresh_correlated(eta1, iteration)

    def _refresh_correlated(self, eta1: np.ndarray, iteration: int | None):
        try:
            cf = cho_factor((self.prec + self.prec.T) / 2.0, lower=True)
        except np.linalg.LinAlgError as exc:
            where = "" if iteration is None else f" at iteration {iteration}"
            raise NumericalError(f"singular posterior precision for the coefficient block{where}") from exc
        self.mu = cho_solve(cf, eta1)
        sigma = cho_solve(cf, np.eye(self.n_coef))
        self.sigma = (sigma + sigma.T) / 2.0
        self._logdet_sigma = -2.0 * float(np.log(np.diag(cf[0])).sum())

    # -- independent family -----------------------------------------------
    def step_coordinate(self, p: int, eta1_target: float, prec_target: float, rho: float):
        eta1 = (1.0 - rho) * (self.prec_diag[p] * self.mu[p]) + rho * eta1_target
        self.prec_diag[p] = (1.0 - rho) * self.prec_diag[p] + rho * prec_target
        self.mu[p] = eta1 / self.prec_diag[p]

    # -- shared -----------------------------------------------------------
    @property
    def var(self) -> np.ndarray:
        """Marginal variances."""
        if self.correlated:
            return np.diag(self.sigma)
        return 1.0 / self.prec_diag

    def e_b2(self) -> np.ndarray:
        return self.mu**2 + self.var

    def entropy(self) -> float:
        if self.correlated:
            return 0.5 * (self.n_coef * (_LOG_2PI + 1.0) + self._logdet_sigma)
        return float(0.5 * np.sum(_LOG_2PI + 1.0 - np.log(self.prec_diag)))

    def quad_trace(self, xtx: np.ndarray | None, col_sq_norms: np.ndarray) -> float:
        """tr(X'X Sigma), with col_sq_norms = diag(X'X) for the independent family."""
        if self.correlated:
            return float(np.sum(xtx * self.sigma))
        return float(col_sq_norms @ (1.0 / self.prec_diag))

    def rowwise_var(self, x: np.ndarray) -> np.ndarray:
        """Var(x_n' b) per row of x."""
        if self.correlated:
            return np.einsum("ij,jk,ik->i", x, self.sigma, x)
        return (x**2) @ (1.0 / self.prec_diag)

    def record(self) -> dict:
        if self.correlated:
            return {"dist": "multivariate normal", "mu": self.mu.copy(), "sigma_mat": self.sigma.copy()}
        return {"dist": "independent normal", "mu": self.mu.copy(), "var": (1.0 / self.prec_diag).copy()}


def sample_mvn_from_precision(mean: np.ndarray, prec: np.ndarray, rng: np.random.Generator,
                              iteration: int | None = None) -> np.ndarray:
    """Draw N(mean, prec^{-1}) via the Cholesky factor of the precision."""
    try:
        cf = cho_factor((prec + prec.T) / 2.0, lower=True)
    except np.linalg.LinAlgError as exc:
        where = "" if iteration is None else f" at iteration {iteration}"
        raise NumericalError(f"singular posterior precision for the coefficient block{where}") from exc
    z = rng.standard_normal(mean.size)
    return mean + solve_triangular(cf[0].T, z, lower=False)


def solve_from_precision(prec: np.ndarray, rhs: np.ndarray, iteration: int | None = None) -> np.ndarray:
    try:
        cf = cho_factor((prec + prec.T) / 2.0, lower=True)
    except np.linalg.LinAlgError as exc:
        where = "" if iteration is None else f" at iteration {iteration}"
        raise NumericalError(f"singular posterior precision for the coefficient block{where}") from exc
    return cho_solve(cf, rhs)

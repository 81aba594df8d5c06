"""Natural-parameter forms of the Gaussian and Gamma families.

Stochastic updates blend natural parameters linearly, so every factor that
receives gradient steps is kept in (or converted to) this form. Convention
for a Gaussian with moments (mu, sigma):

    eta1 = sigma^{-1} mu,    eta2 = -1/2 sigma^{-1},

which makes exp{<eta | (b, b b^T)>} the Gaussian kernel. For a Gamma with
(shape, rate) the coordinates are (shape - 1, -rate) against sufficient
statistics (log x, x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DomainError

__all__ = [
    "GaussianMoment",
    "GaussianNatural",
    "GammaNatural",
    "gaussian_to_natural",
    "gaussian_from_natural",
    "blend_natural",
    "blend_gamma",
]

_SINGULAR_REL = 1e-12


def _spd_cho(mat: np.ndarray, what: str):
    """Cholesky of a symmetric matrix, rejecting near-singular or indefinite input."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError(f"{what} must be a square matrix, got shape {mat.shape}")
    asym = np.abs(mat - mat.T).max(initial=0.0)
    scale = np.abs(mat).max(initial=0.0)
    if scale > 0 and asym > 1e-10 * scale:
        raise DomainError(f"{what} is not symmetric (relative asymmetry {asym / scale:.2e})")
    try:
        cf = cho_factor((mat + mat.T) / 2.0, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"{what} is not positive definite") from exc
    diag = np.diag(cf[0])
    if np.any(diag < _SINGULAR_REL * diag.max()):
        raise DomainError(f"{what} is numerically singular")
    return cf


@dataclass(frozen=True)
class GaussianMoment:
    """Gaussian in moment form: mean vector and SPD covariance."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.atleast_1d(np.asarray(self.mu, dtype=float)))
        object.__setattr__(self, "sigma", np.atleast_2d(np.asarray(self.sigma, dtype=float)))
        if self.sigma.shape != (self.mu.size, self.mu.size):
            raise DomainError("sigma shape does not match mu length")
        _spd_cho(self.sigma, "sigma")


@dataclass(frozen=True)
class GaussianNatural:
    """Gaussian in natural form; -2*eta2 must be symmetric positive definite."""

    eta1: np.ndarray
    eta2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta1", np.atleast_1d(np.asarray(self.eta1, dtype=float)))
        object.__setattr__(self, "eta2", np.atleast_2d(np.asarray(self.eta2, dtype=float)))
        if self.eta2.shape != (self.eta1.size, self.eta1.size):
            raise DomainError("eta2 shape does not match eta1 length")
        _spd_cho(-2.0 * self.eta2, "-2*eta2")


@dataclass(frozen=True)
class GammaNatural:
    """Gamma in natural form: (shape - 1, -rate)."""

    shape_minus_one: float
    neg_rate: float

    def __post_init__(self):
        if not self.shape_minus_one + 1.0 > 0.0:
            raise DomainError("shape must be positive")
        if not -self.neg_rate > 0.0:
            raise DomainError("rate must be positive")


def gaussian_to_natural(m: GaussianMoment) -> GaussianNatural:
    """Map (mu, sigma) to (sigma^{-1} mu, -1/2 sigma^{-1})."""
    cf = _spd_cho(m.sigma, "sigma")
    eta1 = cho_solve(cf, m.mu)
    prec = cho_solve(cf, np.eye(m.mu.size))
    prec = (prec + prec.T) / 2.0
    return GaussianNatural(eta1=eta1, eta2=-0.5 * prec)


def gaussian_from_natural(n: GaussianNatural) -> GaussianMoment:
    """Invert gaussian_to_natural: sigma = (-2 eta2)^{-1}, mu = sigma eta1."""
    cf = _spd_cho(-2.0 * n.eta2, "-2*eta2")
    mu = cho_solve(cf, n.eta1)
    sigma = cho_solve(cf, np.eye(n.eta1.size))
    sigma = (sigma + sigma.T) / 2.0
    return GaussianMoment(mu=mu, sigma=sigma)


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not (0.0 < rho <= 1.0):
        raise DomainError(f"step size must lie in (0, 1], got {rho}")
    return rho


def blend_natural(old: GaussianNatural, target: GaussianNatural, rho: float) -> GaussianNatural:
    """Convex combination (1-rho)*old + rho*target, coordinatewise in natural space."""
    rho = _check_rho(rho)
    if old.eta1.shape != target.eta1.shape:
        raise DomainError("dimension mismatch between blended Gaussians")
    return GaussianNatural(
        eta1=(1.0 - rho) * old.eta1 + rho * target.eta1,
        eta2=(1.0 - rho) * old.eta2 + rho * target.eta2,
    )


def blend_gamma(old: GammaNatural, target: GammaNatural, rho: float) -> GammaNatural:
    """Same step rule applied to the Gamma natural coordinates."""
    rho = _check_rho(rho)
    return GammaNatural(
        shape_minus_one=(1.0 - rho) * old.shape_minus_one + rho * target.shape_minus_one,
        neg_rate=(1.0 - rho) * old.neg_rate + rho * target.neg_rate,
    )

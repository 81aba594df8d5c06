"""Distribution kernels shared by the Gibbs and variational engines.

Truncated-normal moments/sampling for the probit latent variables, Gamma
moments for the precision factors, and the inverse-gamma reciprocal mean
used by the horseshoe auxiliaries. All location arguments accept scalars
or numpy arrays; scalar in, scalar out.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "TruncSide",
    "trunc_normal_mean",
    "sample_trunc_normal",
    "gamma_mean",
    "gamma_mean_log",
    "inv_gamma_mean_reciprocal",
]

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
_TAIL_CUTOVER = 5.0


class TruncSide(enum.Enum):
    """Truncation side: positive <-> support (0, inf), negative <-> (-inf, 0]."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


def _inv_mills(m):
    """phi(m) / Phi(m), evaluated through erfcx so deep tails stay finite."""
    return _SQRT_2_OVER_PI / special.erfcx(-np.asarray(m, dtype=float) / np.sqrt(2.0))


def trunc_normal_mean(location, side: TruncSide):
    """Mean of N(location, 1) truncated to the given side of zero."""
    loc = np.asarray(location, dtype=float)
    if not np.all(np.isfinite(loc)):
        raise DomainError("location must be finite")
    if side is TruncSide.POSITIVE:
        out = loc + _inv_mills(loc)
    else:
        out = loc - _inv_mills(-loc)
    return out if out.ndim else float(out)


def _sample_lower_truncated_std(lower: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draws from a standard normal restricted to [lower, inf), elementwise.

    Inverse CDF in the body; Robert-style exponential rejection once the
    bound is deep in the upper tail, where the CDF saturates.
    """
    out = np.empty_like(lower)
    body = lower <= _TAIL_CUTOVER
    if body.any():
        a = lower[body]
        cdf_a = special.ndtr(a)
        u = rng.uniform(size=a.size)
        out[body] = special.ndtri(cdf_a + u * (1.0 - cdf_a))
    tail = ~body
    if tail.any():
        a = lower[tail]
        alpha = 0.5 * (a + np.sqrt(a * a + 4.0))
        draws = np.empty_like(a)
        todo = np.ones(a.size, dtype=bool)
        while todo.any():
            n_left = int(todo.sum())
            e = rng.exponential(size=n_left) / alpha[todo]
            cand = a[todo] + e
            accept = rng.uniform(size=n_left) <= np.exp(-0.5 * (cand - alpha[todo]) ** 2)
            idx = np.flatnonzero(todo)[accept]
            draws[idx] = cand[accept]
            todo[idx] = False
        out[tail] = draws
    # guard against ndtri returning the bound itself under rounding
    return np.maximum(out, np.nextafter(lower, np.inf))


def sample_trunc_normal(location, side: TruncSide, rng: np.random.Generator):
    """Sample N(location, 1) truncated to the given side of zero."""
    loc = np.atleast_1d(np.asarray(location, dtype=float))
    if not np.all(np.isfinite(loc)):
        raise DomainError("location must be finite")
    if side is TruncSide.POSITIVE:
        draws = loc + _sample_lower_truncated_std(-loc, rng)
    else:
        draws = -(-loc + _sample_lower_truncated_std(loc, rng))
    return draws if np.ndim(location) else float(draws[0])


def sample_trunc_normal_sided(location, positive_mask, rng: np.random.Generator) -> np.ndarray:
    """Vectorized two-sided helper: positive support where the mask is true."""
    loc = np.asarray(location, dtype=float)
    mask = np.asarray(positive_mask, dtype=bool)
    lower = np.where(mask, -loc, loc)
    std = _sample_lower_truncated_std(lower, rng)
    return np.where(mask, loc + std, -(-loc + std))


def _check_positive(name, value):
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value}")


def gamma_mean(shape: float, rate: float) -> float:
    """Mean shape/rate of a Gamma(shape, rate)."""
    _check_positive("shape", shape)
    _check_positive("rate", rate)
    return shape / rate


def gamma_mean_log(shape: float, rate: float) -> float:
    """E[log x] = digamma(shape) - log(rate) for x ~ Gamma(shape, rate)."""
    _check_positive("shape", shape)
    _check_positive("rate", rate)
    return float(special.digamma(shape)) - np.log(rate)


def inv_gamma_mean_reciprocal(shape: float, scale: float) -> float:
    """E[1/x] = shape/scale for x ~ InvGamma(shape, scale)."""
    _check_positive("shape", shape)
    _check_positive("scale", scale)
    return shape / scale

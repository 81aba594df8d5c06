"""Shrinkage-prior blocks shared by the linear and probit engines.

Each block owns the factors (or Gibbs state) for the coefficient-prior
hierarchy and exposes the expected prior precision of each coefficient:

* ridge:     b_p ~ N(0, lambda^{-1}),  lambda ~ Gamma(a, b)
* lasso:     b_p ~ N(0, (lambda g_p)^{-1}), 1/g_p ~ Exp(1/2),
             lambda ~ Gamma(a, b); marginally b_p is double-exponential
             with rate sqrt(lambda), and g_p | b_p is inverse-Gaussian
* horseshoe: b_p ~ N(0, t2 * l2_p) with inverse-gamma auxiliaries
             l2_p ~ IG(1/2, 1/nu_p), nu_p ~ IG(1/2, 1),
             t2 ~ IG(1/2, 1/xi), xi ~ IG(1/2, 1)

All hierarchies are conditionally conjugate, so the same block serves
Gibbs, coordinate updates, and blended stochastic updates.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from ._vi_core import GammaFactor, invgamma_entropy
from .errors import DomainError

_LOG_2PI = np.log(2.0 * np.pi)
_LGAMMA_HALF = float(special.gammaln(0.5))
_DIGAMMA_1 = float(special.digamma(1.0))

PRIORS = ("ridge", "lasso", "horseshoe")


def make_vi_prior(prior: str, n_coef: int, hyper, fixed_lambda: float | None):
    if prior == "ridge":
        return RidgeVI(n_coef, hyper, fixed_lambda)
    if prior == "lasso":
        return LassoVI(n_coef, hyper, fixed_lambda)
    if prior == "horseshoe":
        if fixed_lambda is not None:
            raise DomainError("fixed_lambda is only supported for the ridge and lasso priors")
        return HorseshoeVI(n_coef)
    raise DomainError(f"unknown prior {prior!r}")


def make_gibbs_prior(prior: str, n_coef: int, hyper, fixed_lambda: float | None):
    if prior == "ridge":
        return RidgeGibbs(n_coef, hyper, fixed_lambda)
    if prior == "lasso":
        return LassoGibbs(n_coef, hyper, fixed_lambda)
    if prior == "horseshoe":
        if fixed_lambda is not None:
            raise DomainError("fixed_lambda is only supported for the ridge and lasso priors")
        return HorseshoeGibbs(n_coef)
    raise DomainError(f"unknown prior {prior!r}")


# ---------------------------------------------------------------------------
# variational blocks
# ---------------------------------------------------------------------------

class RidgeVI:
    def __init__(self, n_coef: int, hyper, fixed_lambda: float | None):
        self.n_coef = n_coef
        self.a0 = hyper.a_lambda
        self.b0 = hyper.b_lambda
        self.lam = GammaFactor(hyper.a_lambda, hyper.b_lambda, fixed=fixed_lambda)

    def prec_diag(self) -> np.ndarray:
        return np.full(self.n_coef, self.lam.mean)

    def step(self, e_b2: np.ndarray, rho: float):
        self.lam.step(self.a0 + 0.5 * self.n_coef, self.b0 + 0.5 * float(e_b2.sum()), rho)

    def elbo(self, e_b2: np.ndarray) -> float:
        log_p_b = 0.5 * self.n_coef * (self.lam.mean_log - _LOG_2PI) - 0.5 * self.lam.mean * float(e_b2.sum())
        return log_p_b + self.lam.elbo_terms(self.a0, self.b0)

    def records(self):
        return self.lam.record(), None


class LassoVI:
    """Local factor q(g_p) is inverse-Gaussian with shape 1 and mean a_p^{-1/2};
    only the coefficient a_p = E[lambda] E[b_p^2] needs to be stored."""

    def __init__(self, n_coef: int, hyper, fixed_lambda: float | None):
        self.n_coef = n_coef
        self.a0 = hyper.a_lambda
        self.b0 = hyper.b_lambda
        self.lam = GammaFactor(hyper.a_lambda, hyper.b_lambda, fixed=fixed_lambda)
        self.a_local = np.ones(n_coef)

    def e_gamma(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.a_local)

    def prec_diag(self) -> np.ndarray:
        return self.lam.mean * self.e_gamma()

    def step(self, e_b2: np.ndarray, rho: float):
        target = self.lam.mean * e_b2
        self.a_local = (1.0 - rho) * self.a_local + rho * target
        self.lam.step(
            self.a0 + 0.5 * self.n_coef,
            self.b0 + 0.5 * float(self.e_gamma() @ e_b2),
            rho,
        )

    def elbo(self, e_b2: np.ndarray) -> float:
        # E[log p(b_p | g_p, lambda)] + E[log p(g_p)] + H[q(g_p)]; the E[log g]
        # and E[1/g] pieces cancel against the entropy, leaving closed form
        e_g = self.e_gamma()
        per_coef = (
            0.5 * self.lam.mean_log
            - np.log(2.0)
            - np.sqrt(self.a_local)
            + 0.5 * e_g * (self.a_local - self.lam.mean * e_b2)
        )
        return float(per_coef.sum()) + self.lam.elbo_terms(self.a0, self.b0)

    def records(self):
        locals_ = [
            {"dist": "inverse gaussian", "mu": float(m), "shape": 1.0} for m in self.e_gamma()
        ]
        return self.lam.record(), locals_


class _IGFactor:
    """Inverse-gamma factor with fixed shape; only the scale moves."""

    def __init__(self, shape: float, scale: float):
        self.shape = float(shape)
        self.scale = float(scale)

    @property
    def mean_recip(self) -> float:
        return self.shape / self.scale

    @property
    def mean_log(self) -> float:
        return float(np.log(self.scale) - special.digamma(self.shape))

    def step(self, scale_target: float, rho: float):
        self.scale = (1.0 - rho) * self.scale + rho * scale_target

    def entropy(self) -> float:
        return invgamma_entropy(self.shape, self.scale)


class HorseshoeVI:
    def __init__(self, n_coef: int):
        self.n_coef = n_coef
        self.l2 = [_IGFactor(1.0, 1.0) for _ in range(n_coef)]
        self.nu = [_IGFactor(1.0, 1.0) for _ in range(n_coef)]
        self.t2 = _IGFactor(0.5 * (n_coef + 1), 1.0)
        self.xi = _IGFactor(1.0, 1.0)

    def _recip_l2(self) -> np.ndarray:
        return np.array([f.mean_recip for f in self.l2])

    def prec_diag(self) -> np.ndarray:
        return self.t2.mean_recip * self._recip_l2()

    def step(self, e_b2: np.ndarray, rho: float):
        e_recip_t2 = self.t2.mean_recip
        for p in range(self.n_coef):
            self.l2[p].step(self.nu[p].mean_recip + 0.5 * e_b2[p] * e_recip_t2, rho)
            self.nu[p].step(1.0 + self.l2[p].mean_recip, rho)
        recip_l2 = self._recip_l2()
        self.t2.step(self.xi.mean_recip + 0.5 * float(e_b2 @ recip_l2), rho)
        self.xi.step(1.0 + self.t2.mean_recip, rho)

    def elbo(self, e_b2: np.ndarray) -> float:
        recip_l2 = self._recip_l2()
        recip_nu = np.array([f.mean_recip for f in self.nu])
        log_l2 = np.array([f.mean_log for f in self.l2])
        log_nu = np.array([f.mean_log for f in self.nu])
        e_recip_t2 = self.t2.mean_recip

        total = float(
            np.sum(-0.5 * _LOG_2PI - 0.5 * (self.t2.mean_log + log_l2) - 0.5 * e_b2 * e_recip_t2 * recip_l2)
        )
        # p(l2_p | nu_p) = IG(1/2, 1/nu_p) and p(nu_p) = IG(1/2, 1)
        total += float(np.sum(-0.5 * log_nu - _LGAMMA_HALF - 1.5 * log_l2 - recip_nu * recip_l2))
        total += float(np.sum(-_LGAMMA_HALF - 1.5 * log_nu - recip_nu))
        # p(t2 | xi) = IG(1/2, 1/xi) and p(xi) = IG(1/2, 1)
        total += -0.5 * self.xi.mean_log - _LGAMMA_HALF - 1.5 * self.t2.mean_log - self.xi.mean_recip * e_recip_t2
        total += -_LGAMMA_HALF - 1.5 * self.xi.mean_log - self.xi.mean_recip
        total += sum(f.entropy() for f in self.l2) + sum(f.entropy() for f in self.nu)
        total += self.t2.entropy() + self.xi.entropy()
        return total

    def records(self):
        # the global precision 1/t2 is Gamma(shape, rate=scale)
        lam = {"dist": "gamma", "shape": self.t2.shape, "rate": self.t2.scale}
        locals_ = [{"dist": "inverse gamma", "shape": f.shape, "scale": f.scale} for f in self.l2]
        return lam, locals_


# ---------------------------------------------------------------------------
# Gibbs blocks
# ---------------------------------------------------------------------------

class RidgeGibbs:
    def __init__(self, n_coef: int, hyper, fixed_lambda: float | None):
        self.n_coef = n_coef
        self.a0 = hyper.a_lambda
        self.b0 = hyper.b_lambda
        self.fixed = fixed_lambda
        self.lam = fixed_lambda if fixed_lambda is not None else hyper.a_lambda / hyper.b_lambda

    def prec_diag(self) -> np.ndarray:
        return np.full(self.n_coef, self.lam)

    def sample(self, b: np.ndarray, rng: np.random.Generator):
        if self.fixed is None:
            rate = self.b0 + 0.5 * float(b @ b)
            self.lam = rng.gamma(self.a0 + 0.5 * self.n_coef, 1.0 / rate)

    def lambda_value(self) -> float:
        return self.lam

    def local_values(self):
        return None


class LassoGibbs:
    _MAX_IG_MEAN = 1e8  # guard when a coefficient draw is essentially zero

    def __init__(self, n_coef: int, hyper, fixed_lambda: float | None):
        self.n_coef = n_coef
        self.a0 = hyper.a_lambda
        self.b0 = hyper.b_lambda
        self.fixed = fixed_lambda
        self.lam = fixed_lambda if fixed_lambda is not None else hyper.a_lambda / hyper.b_lambda
        self.gamma = np.ones(n_coef)

    def prec_diag(self) -> np.ndarray:
        return self.lam * self.gamma

    def sample(self, b: np.ndarray, rng: np.random.Generator):
        mean = 1.0 / np.maximum(np.sqrt(self.lam) * np.abs(b), 1.0 / self._MAX_IG_MEAN)
        mean = np.minimum(mean, self._MAX_IG_MEAN)
        self.gamma = rng.wald(mean, 1.0)
        if self.fixed is None:
            rate = self.b0 + 0.5 * float(self.gamma @ (b * b))
            self.lam = rng.gamma(self.a0 + 0.5 * self.n_coef, 1.0 / rate)

    def lambda_value(self) -> float:
        return self.lam

    def local_values(self):
        return self.gamma.copy()


def _sample_invgamma(shape, scale, rng: np.random.Generator):
    return scale / rng.gamma(shape, 1.0, size=np.shape(scale) or None)


class HorseshoeGibbs:
    def __init__(self, n_coef: int):
        self.n_coef = n_coef
        self.l2 = np.ones(n_coef)
        self.nu = np.ones(n_coef)
        self.t2 = 1.0
        self.xi = 1.0

    def prec_diag(self) -> np.ndarray:
        return 1.0 / (self.t2 * self.l2)

    def sample(self, b: np.ndarray, rng: np.random.Generator):
        b2 = b * b
        self.l2 = _sample_invgamma(1.0, 1.0 / self.nu + 0.5 * b2 / self.t2, rng)
        self.nu = _sample_invgamma(1.0, 1.0 + 1.0 / self.l2, rng)
        self.t2 = float(_sample_invgamma(0.5 * (self.n_coef + 1), 1.0 / self.xi + 0.5 * float(np.sum(b2 / self.l2)), rng))
        self.xi = float(_sample_invgamma(1.0, 1.0 + 1.0 / self.t2, rng))

    def lambda_value(self) -> float:
        return 1.0 / self.t2

    def local_values(self):
        return self.l2.copy()

"""Normal linear regression with shrinkage priors: Gibbs, CAVI, and SVI.

Model: y = 1*b0 + X b + e,  e ~ N(0, tau^{-1} I), with b0 ~ N(0, var_b0),
tau ~ Gamma(a_tau, b_tau), and the coefficient prior set by the shrinkage
block (ridge / lasso / horseshoe).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._vi_core import CoefFactor, GammaFactor, ScalarNormalFactor, sample_mvn_from_precision, solve_from_precision
from .engine import ElboTrace, StepSchedule, check_converged, minibatch_indices, step_size
from .errors import DomainError, NumericalError
from .results import GibbsDraws, VariationalFit
from .shrinkage import make_gibbs_prior, make_vi_prior
from .specs import LmModelSpec

_LOG_2PI = np.log(2.0 * np.pi)

__all__ = ["RegressionData", "fit_lm_gibbs", "fit_lm_cavi", "fit_lm_svi", "lm_elbo"]


@dataclass(frozen=True)
class RegressionData:
    """Continuous-response design: X (N x P) and y (length N)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", np.atleast_2d(np.asarray(self.X, dtype=float)))
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=float)))
        if self.X.ndim != 2 or self.X.shape[0] < 1 or self.X.shape[1] < 1:
            raise DomainError("X must be a non-empty N x P matrix")
        if self.y.shape != (self.X.shape[0],):
            raise DomainError("y length must match the number of rows of X")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise DomainError("X and y must be finite")

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def n_coef(self) -> int:
        return self.X.shape[1]


class LmVIState:
    """Variational factors for the linear model, shared by CAVI and SVI."""

    def __init__(self, data: RegressionData, spec: LmModelSpec):
        hyper = spec.hyper
        self.spec = spec
        self.n_total = data.n_obs
        self.b0 = ScalarNormalFactor(mu=float(np.mean(data.y)), prec=1.0 / hyper.var_b0)
        self.coef = CoefFactor(data.n_coef, spec.coeff_family == "correlated")
        self.tau = GammaFactor(hyper.a_tau, hyper.b_tau, fixed=spec.fixed_tau)
        self.prior = make_vi_prior(spec.prior, data.n_coef, hyper, spec.fixed_lambda)

    def iterate(self, x: np.ndarray, y: np.ndarray, scale: float, rho: float,
                xtx: np.ndarray | None = None, col_sq: np.ndarray | None = None,
                iteration: int | None = None):
        """One sweep over the factors in fixed order: b0, b, scales, lambda, tau.

        x, y hold the (mini)batch; scale = N/S reweights data sums to
        full-data size. With the full batch and rho = 1 this is exactly a
        CAVI sweep.
        """
        hyper = self.spec.hyper
        e_tau = self.tau.mean
        if col_sq is None:
            col_sq = np.einsum("ij,ij->j", x, x)

        self.b0.step(
            eta1_target=e_tau * scale * float(np.sum(y - x @ self.coef.mu)),
            prec_target=self.n_total * e_tau + 1.0 / hyper.var_b0,
            rho=rho,
        )

        d_prior = self.prior.prec_diag()
        if self.coef.correlated:
            if xtx is None:
                xtx = x.T @ x
            prec_target = e_tau * scale * xtx + np.diag(d_prior)
            eta1_target = e_tau * scale * (x.T @ (y - self.b0.mu))
            self.coef.step_correlated(eta1_target, prec_target, rho, iteration)
        else:
            resid = y - self.b0.mu - x @ self.coef.mu
            for p in range(self.coef.n_coef):
                col = x[:, p]
                resid_p = resid + col * self.coef.mu[p]
                self.coef.step_coordinate(
                    p,
                    eta1_target=e_tau * scale * float(col @ resid_p),
                    prec_target=e_tau * scale * col_sq[p] + d_prior[p],
                    rho=rho,
                )
                resid = resid_p - col * self.coef.mu[p]

        self.prior.step(self.coef.e_b2(), rho)

        sse = self._expected_sse(x, y, scale, xtx, col_sq)
        self.tau.step(hyper.a_tau + 0.5 * self.n_total, hyper.b_tau + 0.5 * sse, rho)

    def _expected_sse(self, x, y, scale, xtx, col_sq) -> float:
        resid = y - self.b0.mu - x @ self.coef.mu
        if self.coef.correlated and xtx is None:
            xtx = x.T @ x
        quad = self.coef.quad_trace(xtx, col_sq)
        return scale * (float(resid @ resid) + y.size * self.b0.var + quad)

    def elbo(self, x: np.ndarray, y: np.ndarray, scale: float = 1.0,
             xtx: np.ndarray | None = None, col_sq: np.ndarray | None = None) -> float:
        hyper = self.spec.hyper
        if col_sq is None:
            col_sq = np.einsum("ij,ij->j", x, x)
        sse = self._expected_sse(x, y, scale, xtx, col_sq)
        value = -0.5 * self.n_total * _LOG_2PI + 0.5 * self.n_total * self.tau.mean_log - 0.5 * self.tau.mean * sse
        value += -0.5 * np.log(2.0 * np.pi * hyper.var_b0) - (self.b0.mu**2 + self.b0.var) / (2.0 * hyper.var_b0)
        value += self.prior.elbo(self.coef.e_b2())
        value += self.tau.elbo_terms(hyper.a_tau, hyper.b_tau)
        value += self.b0.entropy() + self.coef.entropy()
        return float(value)

    def to_fit(self, algorithm: str, trace: ElboTrace, converged: bool) -> VariationalFit:
        lam, locals_ = self.prior.records()
        return VariationalFit(
            b0={"dist": "normal", "mu": self.b0.mu, "var": self.b0.var},
            b=self.coef.record(),
            tau=self.tau.record(),
            lam=lam,
            local_scales=locals_,
            elbo=trace.as_array(),
            link="lm",
            prior=self.spec.prior,
            coeff_family=self.spec.coeff_family,
            algorithm=algorithm,
            converged=converged,
            converged_at=trace.converged_at,
        )


def lm_elbo(state: LmVIState, data: RegressionData, spec: LmModelSpec) -> float:
    """Full-data ELBO of the current variational state."""
    value = state.elbo(data.X, data.y, scale=1.0)
    if not np.isfinite(value):
        raise NumericalError("ELBO is not finite")
    return value


def fit_lm_cavi(data: RegressionData, spec: LmModelSpec, n_iter: int = 1000,
                rel_tol: float = 1e-4) -> VariationalFit:
    """Coordinate-ascent fit; stops when the ELBO change over five sweeps
    falls below rel_tol, else after n_iter sweeps (flagged not converged)."""
    if not rel_tol > 0.0:
        raise DomainError("rel_tol must be positive")
    state = LmVIState(data, spec)
    xtx = data.X.T @ data.X
    col_sq = np.diag(xtx).copy()
    trace = ElboTrace()
    converged = False
    for t in range(1, n_iter + 1):
        state.iterate(data.X, data.y, scale=1.0, rho=1.0, xtx=xtx, col_sq=col_sq, iteration=t)
        value = state.elbo(data.X, data.y, 1.0, xtx, col_sq)
        if not np.isfinite(value):
            raise NumericalError(f"ELBO became non-finite at sweep {t}")
        trace.append(value)
        if check_converged(trace, rel_tol):
            trace.converged_at = t
            converged = True
            break
    return state.to_fit("cavi", trace, converged)


def fit_lm_svi(data: RegressionData, spec: LmModelSpec, n_iter: int = 1000,
               batch_size: int = 10, schedule: StepSchedule | None = None,
               seed: int | None = 0) -> VariationalFit:
    """Stochastic fit: runs exactly n_iter blended natural-parameter steps."""
    if not 1 <= batch_size <= data.n_obs:
        raise DomainError(f"batch_size must be in [1, {data.n_obs}], got {batch_size}")
    if schedule is None:
        schedule = StepSchedule.constant(0.01)
    rng = np.random.default_rng(seed)
    state = LmVIState(data, spec)
    scale = data.n_obs / batch_size
    trace = ElboTrace()
    for t in range(1, n_iter + 1):
        idx = minibatch_indices(data.n_obs, batch_size, rng)
        xb, yb = data.X[idx], data.y[idx]
        state.iterate(xb, yb, scale=scale, rho=step_size(schedule, t), iteration=t)
        trace.append(state.elbo(xb, yb, scale))
    return state.to_fit("svi", trace, converged=False)


def fit_lm_gibbs(data: RegressionData, spec: LmModelSpec, n_iter: int = 1000,
                 burn_in: int = 500, seed: int | None = 0) -> GibbsDraws:
    """Gibbs sampler; sweeps b0, b, local scales, lambda, tau and keeps the
    states after burn_in."""
    if not 0 <= burn_in < n_iter:
        raise DomainError("burn_in must satisfy 0 <= burn_in < n_iter")
    hyper = spec.hyper
    rng = np.random.default_rng(seed)
    n, p = data.n_obs, data.n_coef
    xtx = data.X.T @ data.X

    b0 = float(np.mean(data.y))
    b = np.zeros(p)
    tau = spec.fixed_tau if spec.fixed_tau is not None else hyper.a_tau / hyper.b_tau
    prior = make_gibbs_prior(spec.prior, p, hyper, spec.fixed_lambda)

    kept = n_iter - burn_in
    out_b0 = np.empty(kept)
    out_b = np.empty((kept, p))
    out_tau = np.empty(kept)
    out_lam = np.empty(kept)
    out_local = np.empty((kept, p)) if prior.local_values() is not None else None

    for it in range(1, n_iter + 1):
        xb = data.X @ b
        prec0 = n * tau + 1.0 / hyper.var_b0
        b0 = rng.normal(tau * float(np.sum(data.y - xb)) / prec0, np.sqrt(1.0 / prec0))

        prec = tau * xtx + np.diag(prior.prec_diag())
        mean = solve_from_precision(prec, tau * (data.X.T @ (data.y - b0)), iteration=it)
        b = sample_mvn_from_precision(mean, prec, rng, iteration=it)

        prior.sample(b, rng)

        resid = data.y - b0 - data.X @ b
        if spec.fixed_tau is None:
            tau = rng.gamma(hyper.a_tau + 0.5 * n, 1.0 / (hyper.b_tau + 0.5 * float(resid @ resid)))

        if it > burn_in:
            k = it - burn_in - 1
            out_b0[k] = b0
            out_b[k] = b
            out_tau[k] = tau
            out_lam[k] = prior.lambda_value()
            if out_local is not None:
                out_local[k] = prior.local_values()

    return GibbsDraws(b0=out_b0, b=out_b, tau=out_tau, lam=out_lam,
                      local_scales=out_local, link="lm", prior=spec.prior)

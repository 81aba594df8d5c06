"""Probit regression via truncated-normal latent augmentation.

Each response y_n = I(z_n > 0) with z_n ~ N(b0 + x_n' b, 1); the latent
block makes every conditional Gaussian, so the same shrinkage machinery
as the linear model applies with unit error variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from ._vi_core import CoefFactor, ScalarNormalFactor, sample_mvn_from_precision, solve_from_precision
from .dists import TruncSide, sample_trunc_normal_sided, trunc_normal_mean
from .engine import ElboTrace, StepSchedule, check_converged, minibatch_indices, step_size
from .errors import DomainError, NumericalError
from .expfam import GaussianNatural, blend_natural
from .results import GibbsDraws, VariationalFit
from .shrinkage import make_gibbs_prior, make_vi_prior
from .specs import LmModelSpec

__all__ = [
    "BinaryData",
    "LatentState",
    "update_latents",
    "natural_gradient_b",
    "svi_step_b",
    "fit_probit_gibbs",
    "fit_probit_cavi",
    "fit_probit_svi",
]


@dataclass(frozen=True)
class BinaryData:
    """Binary-response design: X (N x P) and y in {0, 1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", np.atleast_2d(np.asarray(self.X, dtype=float)))
        y = np.atleast_1d(np.asarray(self.y))
        if not np.all(np.isin(y, (0, 1))):
            raise DomainError("probit responses must be 0 or 1")
        object.__setattr__(self, "y", y.astype(np.int64))
        if self.y.shape != (self.X.shape[0],):
            raise DomainError("y length must match the number of rows of X")
        if not np.all(np.isfinite(self.X)):
            raise DomainError("X must be finite")

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def n_coef(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class LatentState:
    """Expected latent values E[z_n] under the current coefficient means."""

    z_mean: np.ndarray


def update_latents(data: BinaryData, coeff_mean: np.ndarray, b0_mean: float) -> LatentState:
    """Truncated-normal means of the latents, side-matched to the responses."""
    coeff_mean = np.asarray(coeff_mean, dtype=float)
    if coeff_mean.shape != (data.n_coef,):
        raise DomainError("coefficient mean length must equal the number of predictors")
    lin = b0_mean + data.X @ coeff_mean
    pos = trunc_normal_mean(lin, TruncSide.POSITIVE)
    neg = trunc_normal_mean(lin, TruncSide.NEGATIVE)
    return LatentState(z_mean=np.where(data.y == 1, pos, neg))


@dataclass(frozen=True)
class NaturalGradient:
    """Natural-gradient blocks for the coefficient factor. Unlike a natural
    parameter, both blocks may vanish (at a fixed point), so this record
    carries no definiteness constraints."""

    eta1: np.ndarray
    eta2: np.ndarray


def natural_gradient_b(data: BinaryData, latents: LatentState, e_lambda: float,
                       current: GaussianNatural) -> NaturalGradient:
    """Full-data natural gradient of the ELBO for q(b): E[target] - current."""
    eta1_full = data.X.T @ latents.z_mean
    eta2_full = -0.5 * (data.X.T @ data.X + e_lambda * np.eye(data.n_coef))
    return NaturalGradient(eta1=eta1_full - current.eta1, eta2=eta2_full - current.eta2)


def svi_step_b(x_batch: np.ndarray, z_batch_mean: np.ndarray, e_lambda: float,
               current: GaussianNatural, rho: float, n_total: int) -> GaussianNatural:
    """One blended stochastic step for q(b) from a minibatch of size S: data
    sums are scaled by N/S, the prior term enters unscaled."""
    x_batch = np.atleast_2d(np.asarray(x_batch, dtype=float))
    z_batch_mean = np.atleast_1d(np.asarray(z_batch_mean, dtype=float))
    if x_batch.shape[0] == 0:
        raise DomainError("minibatch must be non-empty")
    if x_batch.shape[0] > n_total:
        raise DomainError("minibatch larger than the dataset")
    scale = n_total / x_batch.shape[0]
    target = GaussianNatural(
        eta1=scale * (x_batch.T @ z_batch_mean),
        eta2=-0.5 * (scale * (x_batch.T @ x_batch) + e_lambda * np.eye(x_batch.shape[1])),
    )
    return blend_natural(current, target, rho)


class ProbitVIState:
    """Variational factors for the probit model, shared by CAVI and SVI."""

    def __init__(self, data: BinaryData, spec: LmModelSpec):
        hyper = spec.hyper
        self.spec = spec
        self.n_total = data.n_obs
        self.b0 = ScalarNormalFactor(mu=float(np.mean(data.y)), prec=1.0 / hyper.var_b0)
        self.coef = CoefFactor(data.n_coef, spec.coeff_family == "correlated")
        self.prior = make_vi_prior(spec.prior, data.n_coef, hyper, spec.fixed_lambda)

    def iterate(self, x: np.ndarray, y: np.ndarray, scale: float, rho: float,
                xtx: np.ndarray | None = None, col_sq: np.ndarray | None = None,
                iteration: int | None = None):
        """One sweep: q(z) on the batch, then b0, b, scales, lambda."""
        hyper = self.spec.hyper
        if col_sq is None:
            col_sq = np.einsum("ij,ij->j", x, x)

        z_loc = self.b0.mu + x @ self.coef.mu
        pos = trunc_normal_mean(z_loc, TruncSide.POSITIVE)
        neg = trunc_normal_mean(z_loc, TruncSide.NEGATIVE)
        e_z = np.where(y == 1, pos, neg)

        self.b0.step(
            eta1_target=scale * float(np.sum(e_z - x @ self.coef.mu)),
            prec_target=self.n_total + 1.0 / hyper.var_b0,
            rho=rho,
        )

        d_prior = self.prior.prec_diag()
        if self.coef.correlated:
            if xtx is None:
                xtx = x.T @ x
            prec_target = scale * xtx + np.diag(d_prior)
            eta1_target = scale * (x.T @ (e_z - self.b0.mu))
            self.coef.step_correlated(eta1_target, prec_target, rho, iteration)
        else:
            resid = e_z - self.b0.mu - x @ self.coef.mu
            for p in range(self.coef.n_coef):
                col = x[:, p]
                resid_p = resid + col * self.coef.mu[p]
                self.coef.step_coordinate(
                    p,
                    eta1_target=scale * float(col @ resid_p),
                    prec_target=scale * col_sq[p] + d_prior[p],
                    rho=rho,
                )
                resid = resid_p - col * self.coef.mu[p]

        self.prior.step(self.coef.e_b2(), rho)
        return z_loc, e_z

    def elbo(self, x: np.ndarray, y: np.ndarray, z_loc: np.ndarray, e_z: np.ndarray,
             scale: float = 1.0) -> float:
        """ELBO with the stored q(z) locations z_loc; batch terms scaled to
        full-data units by scale = N/S."""
        hyper = self.spec.hyper
        lin = self.b0.mu + x @ self.coef.mu
        var_lin = self.b0.var + self.coef.rowwise_var(x)
        sign = np.where(y == 1, 1.0, -1.0)
        z_terms = (
            e_z * (lin - z_loc) - 0.5 * lin**2 + 0.5 * z_loc**2 - 0.5 * var_lin
            + special.log_ndtr(sign * z_loc)
        )
        value = scale * float(z_terms.sum())
        value += -0.5 * np.log(2.0 * np.pi * hyper.var_b0) - (self.b0.mu**2 + self.b0.var) / (2.0 * hyper.var_b0)
        value += self.prior.elbo(self.coef.e_b2())
        value += self.b0.entropy() + self.coef.entropy()
        return float(value)

    def to_fit(self, algorithm: str, trace: ElboTrace, converged: bool) -> VariationalFit:
        lam, locals_ = self.prior.records()
        return VariationalFit(
            b0={"dist": "normal", "mu": self.b0.mu, "var": self.b0.var},
            b=self.coef.record(),
            tau=None,
            lam=lam,
            local_scales=locals_,
            elbo=trace.as_array(),
            link="probit",
            prior=self.spec.prior,
            coeff_family=self.spec.coeff_family,
            algorithm=algorithm,
            converged=converged,
            converged_at=trace.converged_at,
        )


def fit_probit_cavi(data: BinaryData, spec: LmModelSpec, n_iter: int = 1000,
                    rel_tol: float = 1e-4) -> VariationalFit:
    if not rel_tol > 0.0:
        raise DomainError("rel_tol must be positive")
    state = ProbitVIState(data, spec)
    xtx = data.X.T @ data.X
    col_sq = np.diag(xtx).copy()
    trace = ElboTrace()
    converged = False
    for t in range(1, n_iter + 1):
        z_loc, e_z = state.iterate(data.X, data.y, scale=1.0, rho=1.0,
                                   xtx=xtx, col_sq=col_sq, iteration=t)
        value = state.elbo(data.X, data.y, z_loc, e_z)
        if not np.isfinite(value):
            raise NumericalError(f"ELBO became non-finite at sweep {t}")
        trace.append(value)
        if check_converged(trace, rel_tol):
            trace.converged_at = t
            converged = True
            break
    return state.to_fit("cavi", trace, converged)


def fit_probit_svi(data: BinaryData, spec: LmModelSpec, n_iter: int = 1000,
                   batch_size: int = 10, schedule: StepSchedule | None = None,
                   seed: int | None = 0) -> VariationalFit:
    """Stochastic fit; latent expectations are computed on the minibatch only,
    so the per-step cost does not grow with N."""
    if not 1 <= batch_size <= data.n_obs:
        raise DomainError(f"batch_size must be in [1, {data.n_obs}], got {batch_size}")
    if schedule is None:
        schedule = StepSchedule.constant(0.01)
    rng = np.random.default_rng(seed)
    state = ProbitVIState(data, spec)
    scale = data.n_obs / batch_size
    trace = ElboTrace()
    for t in range(1, n_iter + 1):
        idx = minibatch_indices(data.n_obs, batch_size, rng)
        xb, yb = data.X[idx], data.y[idx]
        z_loc, e_z = state.iterate(xb, yb, scale=scale, rho=step_size(schedule, t), iteration=t)
        trace.append(state.elbo(xb, yb, z_loc, e_z, scale))
    return state.to_fit("svi", trace, converged=False)


def fit_probit_gibbs(data: BinaryData, spec: LmModelSpec, n_iter: int = 1000,
                     burn_in: int = 500, seed: int | None = 0) -> GibbsDraws:
    """Gibbs sampler; sweeps z, b0, b, local scales, lambda each iteration."""
    if not 0 <= burn_in < n_iter:
        raise DomainError("burn_in must satisfy 0 <= burn_in < n_iter")
    hyper = spec.hyper
    rng = np.random.default_rng(seed)
    n, p = data.n_obs, data.n_coef
    xtx = data.X.T @ data.X
    positive = data.y == 1

    b0 = float(np.mean(data.y))
    b = np.zeros(p)
    prior = make_gibbs_prior(spec.prior, p, hyper, spec.fixed_lambda)

    kept = n_iter - burn_in
    out_b0 = np.empty(kept)
    out_b = np.empty((kept, p))
    out_lam = np.empty(kept)
    out_local = np.empty((kept, p)) if prior.local_values() is not None else None

    for it in range(1, n_iter + 1):
        xb = data.X @ b
        z = sample_trunc_normal_sided(b0 + xb, positive, rng)

        prec0 = n + 1.0 / hyper.var_b0
        b0 = rng.normal(float(np.sum(z - xb)) / prec0, np.sqrt(1.0 / prec0))

        prec = xtx + np.diag(prior.prec_diag())
        mean = solve_from_precision(prec, data.X.T @ (z - b0), iteration=it)
        b = sample_mvn_from_precision(mean, prec, rng, iteration=it)

        prior.sample(b, rng)

        if it > burn_in:
            k = it - burn_in - 1
            out_b0[k] = b0
            out_b[k] = b
            out_lam[k] = prior.lambda_value()
            if out_local is not None:
                out_local[k] = prior.local_values()

    return GibbsDraws(b0=out_b0, b=out_b, tau=np.ones(kept), lam=out_lam,
                      local_scales=out_local, link="probit", prior=spec.prior)

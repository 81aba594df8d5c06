"""Posterior summaries and prediction for variational fits and Gibbs draws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .results import GibbsDraws, VariationalFit

__all__ = [
    "SummaryTable",
    "PredictionSet",
    "summarize_vi",
    "summarize_gibbs",
    "predict_lm",
    "predict_probit",
]


@dataclass(frozen=True)
class SummaryTable:
    names: list
    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float

    def rows(self):
        return list(zip(self.names, self.estimate, self.lower, self.upper))


@dataclass(frozen=True)
class PredictionSet:
    estimate: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray


def _check_level(level: float):
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")


def _row_names(n_coef: int, names) -> list:
    if names is None:
        names = [f"b{p + 1}" for p in range(n_coef)]
    names = list(names)
    if len(names) != n_coef:
        raise DomainError(f"expected {n_coef} coefficient names, got {len(names)}")
    return ["Intercept"] + names


def summarize_vi(fit: VariationalFit, level: float = 0.95, names=None) -> SummaryTable:
    """Mean and equal-tailed Gaussian credible interval per coefficient;
    the intercept row comes first."""
    _check_level(level)
    est = np.concatenate(([fit.b0["mu"]], fit.coef_mean()))
    sd = np.sqrt(np.concatenate(([fit.b0["var"]], fit.coef_var())))
    z = float(special.ndtri(0.5 + level / 2.0))
    return SummaryTable(
        names=_row_names(fit.n_coef, names),
        estimate=est,
        lower=est - z * sd,
        upper=est + z * sd,
        level=level,
    )


def summarize_gibbs(draws: GibbsDraws, level: float = 0.95, names=None) -> SummaryTable:
    """Empirical mean and equal-tailed quantiles (linear interpolation)."""
    _check_level(level)
    if draws.n_kept < 2:
        raise DomainError("need at least 2 kept draws to summarize")
    mat = np.column_stack([draws.b0, draws.b])
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(mat, [alpha, 1.0 - alpha], axis=0)
    return SummaryTable(
        names=_row_names(draws.n_coef, names),
        estimate=mat.mean(axis=0),
        lower=lo,
        upper=hi,
        level=level,
    )


def _check_newdata(x_new: np.ndarray, n_coef: int) -> np.ndarray:
    x_new = np.asarray(x_new, dtype=float)
    if x_new.ndim != 2 or x_new.shape[1] != n_coef:
        raise DomainError(f"new data must have {n_coef} columns, got shape {x_new.shape}")
    return x_new


def _noise_variance(fit: VariationalFit) -> float:
    """E_q[1/tau] when the Gamma shape allows it, else the plug-in 1/E[tau]."""
    tau = fit.tau
    if tau is None:
        return 1.0
    if tau["dist"] == "point":
        return 1.0 / tau["value"]
    if tau["shape"] > 1.0:
        return tau["rate"] / (tau["shape"] - 1.0)
    return tau["rate"] / tau["shape"]


def predict_lm(fit: VariationalFit, x_new: np.ndarray, level: float = 0.95) -> PredictionSet:
    """Predictive means and equal-tailed intervals for new rows. Intervals
    include the observation noise, i.e. they are predictive, not
    mean-response, intervals."""
    _check_level(level)
    x_new = _check_newdata(x_new, fit.n_coef)
    est = fit.b0["mu"] + x_new @ fit.coef_mean()
    var = fit.b0["var"] + fit.coef_quad(x_new) + _noise_variance(fit)
    z = float(special.ndtri(0.5 + level / 2.0))
    sd = np.sqrt(var)
    return PredictionSet(estimate=est, ci_lower=est - z * sd, ci_upper=est + z * sd)


def predict_probit(fit: VariationalFit, x_new: np.ndarray) -> np.ndarray:
    """P(y = 1) per row, integrating the Gaussian coefficient factor through
    the probit link: Phi(m / sqrt(1 + v))."""
    x_new = _check_newdata(x_new, fit.n_coef)
    m = fit.b0["mu"] + x_new @ fit.coef_mean()
    v = fit.b0["var"] + fit.coef_quad(x_new)
    return special.ndtr(m / np.sqrt(1.0 + v))

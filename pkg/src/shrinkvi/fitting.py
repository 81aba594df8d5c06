"""Model-name parsing and a single dispatch point for all 18 fits."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .engine import StepSchedule
from .errors import DomainError, UsageError
from .lm import RegressionData, fit_lm_cavi, fit_lm_gibbs, fit_lm_svi
from .probit import BinaryData, fit_probit_cavi, fit_probit_gibbs, fit_probit_svi
from .specs import LmModelSpec, ModelSpec, PriorHyper

__all__ = ["parse_model_name", "model_name", "FitOptions", "fit_model", "IN_SCOPE_MODEL_NAMES"]

_PRIOR_TOKENS = {"ridge": "ridge", "lasso": "lasso", "hs": "horseshoe"}
_PRIOR_NAMES = {v: k for k, v in _PRIOR_TOKENS.items()}
_LINK_TOKENS = ("lm", "probit")
_ALGO_TOKENS = ("gibbs", "cavi", "svi")

IN_SCOPE_MODEL_NAMES = tuple(
    f"{link}_{prior}_{algo}"
    for link in _LINK_TOKENS
    for prior in _PRIOR_TOKENS
    for algo in _ALGO_TOKENS
)


def parse_model_name(name: str) -> ModelSpec:
    """Parse a link_prior_algorithm model name into a ModelSpec.

    The multivariate names (mv_lm_*, mv_probit_*) are recognized but
    rejected as out of scope.
    """
    if name.startswith("mv_lm") or name.startswith("mv_probit"):
        raise UsageError(
            f"model {name!r} refers to a multivariate model, which is out of scope; "
            f"supported models: {', '.join(IN_SCOPE_MODEL_NAMES)}"
        )
    parts = name.split("_")
    if (
        len(parts) != 3
        or parts[0] not in _LINK_TOKENS
        or parts[1] not in _PRIOR_TOKENS
        or parts[2] not in _ALGO_TOKENS
    ):
        raise UsageError(
            f"unknown model {name!r}; supported models: {', '.join(IN_SCOPE_MODEL_NAMES)}"
        )
    return ModelSpec(link=parts[0], prior=_PRIOR_TOKENS[parts[1]], algorithm=parts[2])


def model_name(model: ModelSpec) -> str:
    return f"{model.link}_{_PRIOR_NAMES[model.prior]}_{model.algorithm}"


@dataclass(frozen=True)
class FitOptions:
    """Algorithm options shared across the dispatch point."""

    n_iter: int = 1000
    burn_in: int | None = None  # defaults to n_iter // 2
    rel_tol: float = 1e-4
    batch_size: int | None = None
    schedule: StepSchedule = field(default_factory=lambda: StepSchedule.constant(0.01))
    seed: int | None = 0
    hyper: PriorHyper = field(default_factory=PriorHyper)
    fixed_lambda: float | None = None
    fixed_tau: float | None = None


def fit_model(model: ModelSpec, x: np.ndarray, y: np.ndarray, options: FitOptions = FitOptions()):
    """Fit any in-scope model; returns a VariationalFit or GibbsDraws."""
    spec = LmModelSpec(
        prior=model.prior,
        coeff_family=model.coeff_family,
        hyper=options.hyper,
        fixed_lambda=options.fixed_lambda,
        fixed_tau=options.fixed_tau,
    )
    if model.link == "probit" and spec.fixed_tau is not None:
        spec = replace(spec, fixed_tau=None)
    if model.link == "lm":
        data = RegressionData(X=x, y=y)
        if model.algorithm == "gibbs":
            burn_in = options.burn_in if options.burn_in is not None else options.n_iter // 2
            return fit_lm_gibbs(data, spec, options.n_iter, burn_in, options.seed)
        if model.algorithm == "cavi":
            return fit_lm_cavi(data, spec, options.n_iter, options.rel_tol)
        if options.batch_size is None:
            raise DomainError("batch_size is required for SVI")
        return fit_lm_svi(data, spec, options.n_iter, options.batch_size, options.schedule, options.seed)
    data = BinaryData(X=x, y=y)
    if model.algorithm == "gibbs":
        burn_in = options.burn_in if options.burn_in is not None else options.n_iter // 2
        return fit_probit_gibbs(data, spec, options.n_iter, burn_in, options.seed)
    if model.algorithm == "cavi":
        return fit_probit_cavi(data, spec, options.n_iter, options.rel_tol)
    if options.batch_size is None:
        raise DomainError("batch_size is required for SVI")
    return fit_probit_svi(data, spec, options.n_iter, options.batch_size, options.schedule, options.seed)

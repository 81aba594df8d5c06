"""Bayesian linear and probit regression with shrinkage priors.

Gibbs sampling, coordinate-ascent variational inference (CAVI), and
stochastic variational inference (SVI) for ridge, lasso, and horseshoe
priors, plus posterior summaries, prediction, and a simulation and
timing harness.
"""

__version__ = "0.1.0"

from .artifact import load_artifact, save_artifact
from .engine import StepSchedule
from .errors import DomainError, NumericalError, UsageError
from .fitting import IN_SCOPE_MODEL_NAMES, FitOptions, fit_model, model_name, parse_model_name
from .lm import RegressionData, fit_lm_cavi, fit_lm_gibbs, fit_lm_svi
from .posterior import predict_lm, predict_probit, summarize_gibbs, summarize_vi
from .probit import BinaryData, fit_probit_cavi, fit_probit_gibbs, fit_probit_svi
from .results import GibbsDraws, VariationalFit
from .simbench import (
    BinarySimDesign,
    LmSimDesign,
    MetricsReport,
    auc_pr,
    coverage,
    gen_binary_data,
    gen_lm_data,
    mse,
    mspe,
    rand_index,
    run_replication,
    run_timing,
    variable_select,
)
from .specs import LmModelSpec, ModelSpec, PriorHyper

__all__ = [
    "__version__",
    "BinaryData",
    "BinarySimDesign",
    "DomainError",
    "FitOptions",
    "GibbsDraws",
    "IN_SCOPE_MODEL_NAMES",
    "LmModelSpec",
    "LmSimDesign",
    "MetricsReport",
    "ModelSpec",
    "NumericalError",
    "PriorHyper",
    "RegressionData",
    "StepSchedule",
    "UsageError",
    "VariationalFit",
    "auc_pr",
    "coverage",
    "fit_lm_cavi",
    "fit_lm_gibbs",
    "fit_lm_svi",
    "fit_model",
    "fit_probit_cavi",
    "fit_probit_gibbs",
    "fit_probit_svi",
    "gen_binary_data",
    "gen_lm_data",
    "load_artifact",
    "model_name",
    "mse",
    "mspe",
    "parse_model_name",
    "predict_lm",
    "predict_probit",
    "rand_index",
    "run_replication",
    "run_timing",
    "save_artifact",
    "summarize_gibbs",
    "summarize_vi",
    "variable_select",
]

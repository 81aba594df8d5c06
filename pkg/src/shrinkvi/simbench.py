"""Simulation designs, evaluation metrics, and the replication/timing harness.

The linear design draws predictor rows from N(0, V) with V[j,k] =
ar_rho^|j-k|, standard-normal coefficients with a uniformly chosen subset
zeroed, and noise variance set from the realized var(Xb) so the
signal-to-noise ratio is exact per dataset.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .errors import DomainError
from .fitting import FitOptions, ModelSpec, fit_model, model_name
from .posterior import predict_probit, summarize_gibbs, summarize_vi
from .results import GibbsDraws, VariationalFit

__all__ = [
    "LmSimDesign",
    "BinarySimDesign",
    "MetricsReport",
    "gen_lm_data",
    "gen_binary_data",
    "mse",
    "mspe",
    "coverage",
    "rand_index",
    "auc_pr",
    "variable_select",
    "run_replication",
    "run_timing",
]


@dataclass(frozen=True)
class LmSimDesign:
    N: int
    P: int
    zero_frac: float = 0.8
    snr: float = 1.0
    ar_rho: float = 0.5
    seed: object = 0

    def __post_init__(self):
        if self.N < 1 or self.P < 1:
            raise DomainError("N and P must be positive")
        if not 0.0 <= self.zero_frac < 1.0:
            raise DomainError("zero_frac must be in [0, 1)")
        if not self.snr > 0.0:
            raise DomainError("snr must be positive")
        if not -1.0 < self.ar_rho < 1.0:
            raise DomainError("ar_rho must be in (-1, 1)")


@dataclass(frozen=True)
class BinarySimDesign:
    N: int
    P: int
    n_zero: int
    link: str = "probit"
    ar_rho: float = 0.5
    seed: object = 0

    def __post_init__(self):
        if self.N < 1 or self.P < 1:
            raise DomainError("N and P must be positive")
        if not 0 <= self.n_zero <= self.P:
            raise DomainError("n_zero must be in [0, P]")
        if self.link not in ("probit", "logit"):
            raise DomainError("link must be 'probit' or 'logit'")


@dataclass(frozen=True)
class MetricsReport:
    method: str
    replicate: int
    mse: float
    mspe: float
    coverage: float
    wall_clock_s: float
    rand_index: float | None = None
    auc_pr: float | None = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "replicate": self.replicate,
            "mse": self.mse,
            "mspe": self.mspe,
            "coverage": self.coverage,
            "rand_index": self.rand_index,
            "auc_pr": self.auc_pr,
            "wall_clock_s": self.wall_clock_s,
        }


# ---------------------------------------------------------------------------
# data generation
# ---------------------------------------------------------------------------

def _ar_cholesky(p: int, ar_rho: float) -> np.ndarray:
    cov = ar_rho ** np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    return np.linalg.cholesky(cov)

def _draw_x(n: int, chol: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, chol.shape[0])) @ chol.T


def _draw_coefficients(p: int, n_zero: int, rng: np.random.Generator) -> np.ndarray:
    b = rng.standard_normal(p)
    if n_zero:
        b[rng.choice(p, size=n_zero, replace=False)] = 0.0
    return b


def gen_lm_data(design: LmSimDesign):
    """Returns (X, y, b_true, b0_true, sigma2)."""
    rng = np.random.default_rng(design.seed)
    chol = _ar_cholesky(design.P, design.ar_rho)
    x = _draw_x(design.N, chol, rng)
    b = _draw_coefficients(design.P, int(np.floor(design.zero_frac * design.P)), rng)
    b0 = rng.standard_normal()
    signal = x @ b
    sigma2 = max(float(np.var(signal)), 1e-12) / design.snr
    y = b0 + signal + rng.normal(0.0, np.sqrt(sigma2), design.N)
    return x, y, b, float(b0), sigma2


def gen_binary_data(design: BinarySimDesign):
    """Returns (X, y, b_true, b0_true)."""
    rng = np.random.default_rng(design.seed)
    chol = _ar_cholesky(design.P, design.ar_rho)
    x = _draw_x(design.N, chol, rng)
    b = _draw_coefficients(design.P, design.n_zero, rng)
    b0 = rng.standard_normal()
    z = b0 + x @ b
    prob = special.ndtr(z) if design.link == "probit" else special.expit(z)
    y = (rng.uniform(size=design.N) < prob).astype(np.int64)
    return x, y, b, float(b0)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def mse(b_true, b_hat) -> float:
    """Mean squared coefficient error, averaged over replicates and coordinates.
    Accepts single vectors or lists of per-replicate vectors."""
    true_list = b_true if isinstance(b_true, (list, tuple)) else [b_true]
    hat_list = b_hat if isinstance(b_hat, (list, tuple)) else [b_hat]
    if len(true_list) != len(hat_list):
        raise DomainError("replicate counts differ")
    errs = [np.mean((np.asarray(t, float) - np.asarray(h, float)) ** 2) for t, h in zip(true_list, hat_list)]
    return float(np.mean(errs))


def mspe(x_test: np.ndarray, b_true: np.ndarray, b_hat: np.ndarray) -> float:
    """Relative root prediction error ||X(b - b_hat)|| / ||X b||."""
    x_test = np.asarray(x_test, dtype=float)
    signal = x_test @ np.asarray(b_true, dtype=float)
    denom = float(signal @ signal)
    if denom <= 0.0:
        raise DomainError("true signal is zero; relative error undefined")
    diff = signal - x_test @ np.asarray(b_hat, dtype=float)
    return float(np.sqrt(float(diff @ diff) / denom))


def coverage(b_true, lower, upper) -> float:
    b_true = np.asarray(b_true, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    return float(np.mean((lower <= b_true) & (b_true <= upper)))


def rand_index(selected_true, selected_hat) -> float:
    """Pairwise agreement between two binary partitions."""
    a = np.asarray(selected_true).astype(bool)
    b = np.asarray(selected_hat).astype(bool)
    if a.shape != b.shape or a.size < 2:
        raise DomainError("inputs must be equal-length vectors with at least 2 entries")
    n = a.size
    counts = np.array([
        np.sum(a & b), np.sum(a & ~b), np.sum(~a & b), np.sum(~a & ~b)
    ], dtype=float)
    def _pairs(k):
        return k * (k - 1) / 2.0
    total = _pairs(n)
    same_both = _pairs(counts).sum()
    same_a = _pairs(counts[0] + counts[1]) + _pairs(counts[2] + counts[3])
    same_b = _pairs(counts[0] + counts[2]) + _pairs(counts[1] + counts[3])
    return float((total + 2.0 * same_both - same_a - same_b) / total)


def auc_pr(labels, scores) -> float:
    """Area under the precision-recall step curve (average precision), with
    equal scores collapsed into one threshold."""
    labels = np.asarray(labels).astype(int)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape:
        raise DomainError("labels and scores must have equal length")
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DomainError("need at least one positive label")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(labels[order])
    pred = np.arange(1, labels.size + 1)
    # keep only the last index of each tied-score block
    block_end = np.flatnonzero(np.diff(sorted_scores) != 0.0)
    block_end = np.append(block_end, labels.size - 1)
    recall = tp[block_end] / n_pos
    precision = tp[block_end] / pred[block_end]
    prev_recall = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev_recall) * precision))


def _interval_excludes_zero(estimate, lower, upper):
    return (lower > 0.0) | (upper < 0.0)


def variable_select(fit, rule=None, level: float = 0.95) -> np.ndarray:
    """Binary selection vector for the coefficients; default rule selects a
    coefficient when its credible interval excludes zero."""
    if rule is None:
        rule = _interval_excludes_zero
    if isinstance(fit, VariationalFit):
        table = summarize_vi(fit, level=level)
    elif isinstance(fit, GibbsDraws):
        table = summarize_gibbs(fit, level=level)
    else:
        raise DomainError(f"cannot select variables from {type(fit).__name__}")
    return np.asarray(rule(table.estimate[1:], table.lower[1:], table.upper[1:]), dtype=bool)


# ---------------------------------------------------------------------------
# replication and timing harness
# ---------------------------------------------------------------------------

def _coef_summary(fit, level=0.95):
    table = summarize_vi(fit, level) if isinstance(fit, VariationalFit) else summarize_gibbs(fit, level)
    return table.estimate[1:], table.lower[1:], table.upper[1:]


def _probit_scores(fit, x_test):
    if isinstance(fit, VariationalFit):
        return predict_probit(fit, x_test)
    lin = fit.b0.mean() + x_test @ fit.coef_mean()
    return special.ndtr(lin)


def _evaluate(method, replicate, fit, seconds, truth, test) -> MetricsReport:
    b_true = truth["b"]
    b_hat, lower, upper = _coef_summary(fit)
    report = dict(
        method=method,
        replicate=replicate,
        mse=mse(b_true, b_hat),
        mspe=mspe(test["X"], b_true, b_hat),
        coverage=coverage(b_true, lower, upper),
        wall_clock_s=seconds,
    )
    if truth["link"] == "probit":
        report["rand_index"] = rand_index(b_true != 0.0, variable_select(fit))
        report["auc_pr"] = auc_pr(test["y"], _probit_scores(fit, test["X"]))
    return MetricsReport(**report)


def _replicate_reports(design, methods, d: int, master_seed: int,
                       test_size: int, options: FitOptions) -> list:
    """All method reports for replicate d; seeds derive from master_seed only,
    so replicates are independent of execution order."""
    rep_ss = np.random.SeedSequence(master_seed, spawn_key=(d,))
    data_ss, test_ss, *fit_ss = rep_ss.spawn(2 + len(methods))
    local = replace(design, seed=data_ss)
    if isinstance(design, BinarySimDesign):
        x, y, b_true, b0_true = gen_binary_data(local)
        truth = {"b": b_true, "b0": b0_true, "link": "probit"}
        test = _binary_test_set(local, b_true, b0_true, test_size, test_ss)
    else:
        x, y, b_true, b0_true, sigma2 = gen_lm_data(local)
        truth = {"b": b_true, "b0": b0_true, "link": "lm"}
        test = _lm_test_set(local, b_true, b0_true, sigma2, test_size, test_ss)
    reports = []
    for m, model in enumerate(methods):
        opts = replace(options, seed=fit_ss[m].generate_state(1)[0].item())
        start = time.perf_counter()
        fit = fit_model(model, x, y, opts)
        seconds = time.perf_counter() - start
        name = model_name(model)
        if model.algorithm != "gibbs":
            name += f" ({model.coeff_family})"
        reports.append(_evaluate(name, d, fit, seconds, truth, test))
    return reports


def run_replication(design, methods, n_replicates: int, master_seed: int = 0,
                    test_size: int = 500, options: FitOptions = FitOptions(),
                    n_jobs: int = 1) -> list:
    """One MetricsReport per (replicate, method); seeds derive from master_seed.
    With n_jobs > 1 replicates run in a process pool; results are identical."""
    if n_jobs < 1:
        raise DomainError("n_jobs must be >= 1")
    if n_jobs == 1:
        nested = [_replicate_reports(design, methods, d, master_seed, test_size, options)
                  for d in range(n_replicates)]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            nested = list(pool.map(
                _replicate_reports,
                [design] * n_replicates,
                [methods] * n_replicates,
                range(n_replicates),
                [master_seed] * n_replicates,
                [test_size] * n_replicates,
                [options] * n_replicates,
            ))
    return [report for reports in nested for report in reports]


def _lm_test_set(design, b, b0, sigma2, test_size, seed):
    rng = np.random.default_rng(seed)
    x = _draw_x(test_size, _ar_cholesky(design.P, design.ar_rho), rng)
    y = b0 + x @ b + rng.normal(0.0, np.sqrt(sigma2), test_size)
    return {"X": x, "y": y}


def _binary_test_set(design, b, b0, test_size, seed):
    rng = np.random.default_rng(seed)
    x = _draw_x(test_size, _ar_cholesky(design.P, design.ar_rho), rng)
    z = b0 + x @ b
    prob = special.ndtr(z) if design.link == "probit" else special.expit(z)
    y = (rng.uniform(size=test_size) < prob).astype(np.int64)
    return {"X": x, "y": y}


def run_timing(vary: str, fixed_value: int, values, methods, n_datasets: int = 5,
               options: FitOptions = FitOptions(), master_seed: int = 0,
               zero_frac: float = 0.8) -> list:
    """Wall-clock seconds per (method, grid point, dataset). vary is 'P'
    (N fixed) or 'N' (P fixed); data generation is excluded from the timer."""
    if vary not in ("P", "N"):
        raise DomainError("vary must be 'P' or 'N'")
    rows = []
    for value in values:
        n = fixed_value if vary == "P" else value
        p = value if vary == "P" else fixed_value
        for d in range(n_datasets):
            seed = np.random.SeedSequence(master_seed, spawn_key=(value, d))
            lm_cache = binary_cache = None
            for model in methods:
                if model.link == "lm":
                    if lm_cache is None:
                        x, y, *_ = gen_lm_data(LmSimDesign(N=n, P=p, zero_frac=zero_frac, seed=seed))
                        lm_cache = (x, y)
                    x, y = lm_cache
                else:
                    if binary_cache is None:
                        n_zero = int(np.floor(zero_frac * p))
                        x, y, *_ = gen_binary_data(BinarySimDesign(N=n, P=p, n_zero=n_zero, seed=seed))
                        binary_cache = (x, y)
                    x, y = binary_cache
                start = time.perf_counter()
                fit_model(model, x, y, options)
                seconds = time.perf_counter() - start
                name = model_name(model)
                if model.algorithm != "gibbs":
                    name += f" ({model.coeff_family})"
                rows.append({
                    "method": name,
                    "vary": vary,
                    "value": int(value),
                    "N": int(n),
                    "P": int(p),
                    "dataset": d,
                    "seconds": seconds,
                })
    return rows

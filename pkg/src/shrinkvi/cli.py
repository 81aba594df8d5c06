"""Command-line surface: fit, predict, summarize, simulate, bench."""

from __future__ import annotations

import csv
import json
import platform
import sys
import time
from dataclasses import replace
from pathlib import Path

import click
import numpy as np
import pandas as pd
from scipy import special

from . import __version__
from .artifact import load_artifact, save_artifact
from .engine import StepSchedule
from .errors import DomainError, NumericalError, UsageError
from .fitting import FitOptions, fit_model, model_name, parse_model_name
from .plots import save_elbo_figure, save_metric_figure, save_timing_figure
from .posterior import predict_lm, predict_probit, summarize_gibbs, summarize_vi
from .results import GibbsDraws, VariationalFit
from .simbench import BinarySimDesign, LmSimDesign, run_replication, run_timing

EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _run(body):
    """Map exceptions to the documented exit codes."""
    try:
        body()
    except (OSError, pd.errors.ParserError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except (UsageError, DomainError, click.UsageError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except NumericalError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)


def _read_table(path: str, response: str | None):
    """CSV with a header row; all used columns must be numeric."""
    frame = pd.read_csv(path)
    if frame.shape[0] == 0 and frame.shape[1] == 0:
        raise DomainError(f"{path} is empty")
    y = None
    if response is not None:
        if response not in frame.columns:
            raise DomainError(f"response column {response!r} not found in {path}")
        y = frame[response].to_numpy()
        frame = frame.drop(columns=[response])
    if len(frame) > 0:  # empty frames infer object dtype for every column
        bad = [c for c in frame.columns if not pd.api.types.is_numeric_dtype(frame[c])]
        if bad:
            raise DomainError(f"non-numeric predictor columns: {', '.join(map(str, bad))}")
    return frame.to_numpy(dtype=float).reshape(len(frame), frame.shape[1]), y, list(frame.columns)


def _build_schedule(const_rhot, omega, kappa) -> StepSchedule:
    if const_rhot is not None and (omega is not None or kappa is not None):
        raise DomainError("const-rhot and omega/kappa are mutually exclusive")
    if omega is not None or kappa is not None:
        if omega is None or kappa is None:
            raise DomainError("decaying schedules need both omega and kappa")
        return StepSchedule.decaying(omega, kappa)
    return StepSchedule.constant(const_rhot if const_rhot is not None else 0.01)


@click.group()
@click.version_option(__version__)
def main():
    """Bayesian linear and probit regression with shrinkage priors."""


@main.command()
@click.option("--model", "model_str", required=True, help="link_prior_algorithm, e.g. lm_ridge_cavi")
@click.option("--data", "data_path", required=True, type=click.Path(), help="training CSV with header")
@click.option("--response", default="y", show_default=True, help="response column name")
@click.option("--family", type=click.Choice(["correlated", "independent"]), default="correlated", show_default=True)
@click.option("--n-iter", default=1000, show_default=True, type=int)
@click.option("--burn-in", default=None, type=int, help="Gibbs burn-in [default: n_iter/2]")
@click.option("--rel-tol", default=1e-4, show_default=True, type=float)
@click.option("--batch-size", default=None, type=int, help="SVI minibatch size (required for SVI)")
@click.option("--const-rhot", default=None, type=float, help="constant SVI step size [default: 0.01]")
@click.option("--omega", default=None, type=float, help="SVI schedule delay")
@click.option("--kappa", default=None, type=float, help="SVI schedule forgetting rate")
@click.option("--seed", default=None, type=int, help="RNG seed; time-derived and recorded if absent")
@click.option("--out", "out_path", required=True, type=click.Path(), help="artifact JSON path")
@click.option("--elbo-plot", default=None, type=click.Path(), help="optional ELBO trace figure (PNG)")
def fit(model_str, data_path, response, family, n_iter, burn_in, rel_tol,
        batch_size, const_rhot, omega, kappa, seed, out_path, elbo_plot):
    """Fit a model on CSV data and persist a JSON artifact."""

    def body():
        model = replace(parse_model_name(model_str), coeff_family=family)
        x, y, _ = _read_table(data_path, response)
        used_seed = seed if seed is not None else time.time_ns() % (2**63)
        options = FitOptions(
            n_iter=n_iter,
            burn_in=burn_in,
            rel_tol=rel_tol,
            batch_size=batch_size,
            schedule=_build_schedule(const_rhot, omega, kappa),
            seed=used_seed,
        )
        result = fit_model(model, x, y, options)
        meta = {
            "version": __version__,
            "model_name": model_name(model),
            "family": family,
            "seed": int(used_seed),
            "seed_explicit": seed is not None,
            "n_iter": n_iter,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        save_artifact(result, meta, out_path)
        if elbo_plot is not None and isinstance(result, VariationalFit):
            save_elbo_figure(result.elbo, elbo_plot)
        click.echo(f"wrote {out_path}")

    _run(body)


def _gibbs_lm_predictions(draws: GibbsDraws, x_new, level):
    z = float(special.ndtri(0.5 + level / 2.0))
    lin = draws.b0[:, None] + draws.b @ x_new.T
    est = lin.mean(axis=0)
    sd = np.sqrt(lin.var(axis=0) + float(np.mean(1.0 / draws.tau)))
    return est, est - z * sd, est + z * sd


@main.command()
@click.option("--artifact", "artifact_path", required=True, type=click.Path())
@click.option("--data", "data_path", required=True, type=click.Path(), help="CSV of new predictor rows")
@click.option("--level", default=0.95, show_default=True, type=float)
@click.option("--out", "out_path", default=None, type=click.Path(), help="output CSV [default: stdout]")
def predict(artifact_path, data_path, level, out_path):
    """Predict for new data: estimate/lower/upper (lm) or prob (probit)."""

    def body():
        fit_obj, _ = load_artifact(artifact_path)
        x_new, _, _ = _read_table(data_path, response=None)
        n_coef = fit_obj.n_coef
        if x_new.shape[1] != n_coef:
            raise DomainError(f"expected {n_coef} predictor columns, got {x_new.shape[1]}")
        link = fit_obj.link
        if link == "probit":
            if isinstance(fit_obj, VariationalFit):
                prob = predict_probit(fit_obj, x_new)
            else:
                prob = special.ndtr(fit_obj.b0[:, None] + fit_obj.b @ x_new.T).mean(axis=0)
            header, rows = ["prob"], [[p] for p in prob]
        else:
            if isinstance(fit_obj, VariationalFit):
                pred = predict_lm(fit_obj, x_new, level)
                est, lo, hi = pred.estimate, pred.ci_lower, pred.ci_upper
            else:
                est, lo, hi = _gibbs_lm_predictions(fit_obj, x_new, level)
            header, rows = ["estimate", "lower", "upper"], list(zip(est, lo, hi))
        handle = open(out_path, "w", newline="") if out_path else sys.stdout
        try:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])
        finally:
            if out_path:
                handle.close()

    _run(body)


@main.command()
@click.option("--artifact", "artifact_path", required=True, type=click.Path())
@click.option("--level", default=0.95, show_default=True, type=float)
@click.option("--names", default=None, help="comma-separated coefficient names")
def summarize(artifact_path, level, names):
    """Print the estimate / lower / upper table for a fit artifact."""

    def body():
        fit_obj, _ = load_artifact(artifact_path)
        coef_names = names.split(",") if names else None
        if isinstance(fit_obj, VariationalFit):
            table = summarize_vi(fit_obj, level, coef_names)
        else:
            table = summarize_gibbs(fit_obj, level, coef_names)
        width = max(len(n) for n in table.names)
        click.echo(f"{'':<{width}}  {'Estimate':>12}  {'Lower':>12}  {'Upper':>12}")
        for name, est, lo, hi in table.rows():
            click.echo(f"{name:<{width}}  {est:>12.6f}  {lo:>12.6f}  {hi:>12.6f}")

    _run(body)


def _parse_methods(entries):
    methods = []
    for entry in entries:
        if isinstance(entry, str):
            methods.append(parse_model_name(entry))
        else:
            model = parse_model_name(entry["name"])
            methods.append(replace(model, coeff_family=entry.get("family", "correlated")))
    return methods


def _parse_options(doc: dict) -> FitOptions:
    schedule = _build_schedule(doc.get("const_rhot"), doc.get("omega"), doc.get("kappa"))
    return FitOptions(
        n_iter=doc.get("n_iter", 1000),
        burn_in=doc.get("burn_in"),
        rel_tol=doc.get("rel_tol", 1e-4),
        batch_size=doc.get("batch_size"),
        schedule=schedule,
    )


def _parse_design(doc: dict):
    kind = doc.get("kind", "lm")
    if kind == "lm":
        return LmSimDesign(
            N=doc["N"], P=doc["P"],
            zero_frac=doc.get("zero_frac", 0.8),
            snr=doc.get("snr", 1.0),
            ar_rho=doc.get("ar_rho", 0.5),
        )
    if kind == "binary":
        return BinarySimDesign(
            N=doc["N"], P=doc["P"],
            n_zero=doc["n_zero"],
            link=doc.get("link", "probit"),
            ar_rho=doc.get("ar_rho", 0.5),
        )
    raise DomainError(f"unknown design kind {kind!r}")


def _write_csv(path, rows, header):
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="study config JSON")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--jobs", default=1, show_default=True, type=int, help="worker processes for replicates")
@click.option("--no-figures", is_flag=True, help="skip rendering PNG figures")
def simulate(config_path, out_dir, jobs, no_figures):
    """Run a replicated simulation study; write metrics JSON, CSV, and figures."""

    def body():
        with open(config_path) as handle:
            cfg = json.load(handle)
        design = _parse_design(cfg["design"])
        methods = _parse_methods(cfg["methods"])
        reports = run_replication(
            design,
            methods,
            n_replicates=cfg.get("replicates", 50),
            master_seed=cfg.get("master_seed", 0),
            test_size=cfg.get("test_size", 500),
            options=_parse_options(cfg.get("options", {})),
            n_jobs=jobs,
        )
        rows = [r.to_dict() for r in reports]
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        aggregates = _aggregate(rows)
        with open(out / "metrics.json", "w") as handle:
            json.dump({"config": cfg, "replicates": rows, "aggregate": aggregates},
                      handle, indent=1)
            handle.write("\n")
        _write_csv(out / "metrics.csv", rows, list(rows[0].keys()))
        if not no_figures:
            save_metric_figure(rows, out / "metrics.png")
        click.echo(f"wrote {out / 'metrics.json'}")

    _run(body)


def _aggregate(rows):
    by_method = {}
    for row in rows:
        by_method.setdefault(row["method"], []).append(row)
    out = {}
    for method, entries in sorted(by_method.items()):
        agg = {}
        for key in ("mse", "mspe", "coverage", "rand_index", "auc_pr", "wall_clock_s"):
            values = [e[key] for e in entries if e[key] is not None]
            agg[key] = float(np.mean(values)) if values else None
        out[method] = agg
    return out


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="timing grid JSON")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--jobs", default=1, show_default=True, type=int,
              help="accepted for symmetry; timing always runs serially")
@click.option("--no-figures", is_flag=True, help="skip rendering PNG figures")
def bench(config_path, out_dir, jobs, no_figures):
    """Run the timing grid; write per-point wall-clock JSON, CSV, and a figure."""

    def body():
        if jobs < 1:
            raise DomainError("jobs must be >= 1")
        if jobs > 1:
            click.echo("note: timing runs serially to keep measurements clean", err=True)
        with open(config_path) as handle:
            cfg = json.load(handle)
        rows = run_timing(
            vary=cfg["vary"],
            fixed_value=cfg["fixed_value"],
            values=cfg["values"],
            methods=_parse_methods(cfg["methods"]),
            n_datasets=cfg.get("n_datasets", 5),
            options=_parse_options(cfg.get("options", {})),
            master_seed=cfg.get("master_seed", 0),
            zero_frac=cfg.get("zero_frac", 0.8),
        )
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        environment = {
            "cpu": platform.processor() or platform.machine(),
            "platform": platform.platform(),
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        with open(out / "timing.json", "w") as handle:
            json.dump({"config": cfg, "environment": environment, "rows": rows},
                      handle, indent=1)
            handle.write("\n")
        _write_csv(out / "timing.csv", rows, list(rows[0].keys()))
        if not no_figures:
            save_timing_figure(rows, out / "timing.png")
        click.echo(f"wrote {out / 'timing.json'}")

    _run(body)


if __name__ == "__main__":
    main()

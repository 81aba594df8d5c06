"""JSON fit artifacts: schema-versioned, full float precision, lossless round trip."""

from __future__ import annotations

import json

import numpy as np

from .errors import DomainError
from .results import GibbsDraws, VariationalFit

SCHEMA_VERSION = 1


def _to_jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    return value


def artifact_dict(fit, meta: dict) -> dict:
    """Build the nested artifact structure for either fit kind."""
    if isinstance(fit, VariationalFit):
        body = {
            "kind": "variational",
            "b0": fit.b0,
            "b": fit.b,
            "tau": fit.tau,
            "lambda": fit.lam,
            "local_scales": fit.local_scales,
            "elbo": fit.elbo,
            "model": {
                "link": fit.link,
                "prior": fit.prior,
                "family": fit.coeff_family,
                "algorithm": fit.algorithm,
            },
        }
        meta = dict(meta, converged=fit.converged, converged_at=fit.converged_at)
    elif isinstance(fit, GibbsDraws):
        body = {
            "kind": "gibbs",
            "b0": fit.b0,
            "b": fit.b,
            "tau": fit.tau,
            "lambda": fit.lam,
            "local_scales": fit.local_scales,
            "model": {"link": fit.link, "prior": fit.prior, "algorithm": "gibbs"},
        }
    else:
        raise DomainError(f"cannot serialize {type(fit).__name__}")
    return _to_jsonable({"schema_version": SCHEMA_VERSION, **body, "meta": meta})


def save_artifact(fit, meta: dict, path):
    with open(path, "w") as handle:
        json.dump(artifact_dict(fit, meta), handle, indent=1, allow_nan=False)
        handle.write("\n")


def load_artifact(path):
    """Returns (fit, meta); the fit is a VariationalFit or GibbsDraws."""
    with open(path) as handle:
        doc = json.load(handle)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DomainError(f"unsupported artifact schema version {doc.get('schema_version')!r}")
    meta = doc.get("meta", {})
    model = doc["model"]
    if doc["kind"] == "variational":
        b = dict(doc["b"])
        b["mu"] = np.asarray(b["mu"], dtype=float)
        if "sigma_mat" in b:
            b["sigma_mat"] = np.asarray(b["sigma_mat"], dtype=float)
        else:
            b["var"] = np.asarray(b["var"], dtype=float)
        fit = VariationalFit(
            b0=doc["b0"],
            b=b,
            tau=doc["tau"],
            lam=doc["lambda"],
            local_scales=doc["local_scales"],
            elbo=np.asarray(doc["elbo"], dtype=float),
            link=model["link"],
            prior=model["prior"],
            coeff_family=model["family"],
            algorithm=model["algorithm"],
            converged=bool(meta.get("converged", False)),
            converged_at=meta.get("converged_at"),
        )
        return fit, meta
    if doc["kind"] == "gibbs":
        local = doc["local_scales"]
        fit = GibbsDraws(
            b0=np.asarray(doc["b0"], dtype=float),
            b=np.asarray(doc["b"], dtype=float),
            tau=np.asarray(doc["tau"], dtype=float),
            lam=np.asarray(doc["lambda"], dtype=float),
            local_scales=None if local is None else np.asarray(local, dtype=float),
            link=model["link"],
            prior=model["prior"],
        )
        return fit, meta
    raise DomainError(f"unknown artifact kind {doc['kind']!r}")

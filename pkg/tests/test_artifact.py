import json

import numpy as np
import pytest

from shrinkvi.artifact import SCHEMA_VERSION, artifact_dict, load_artifact, save_artifact
from shrinkvi.errors import DomainError
from shrinkvi.lm import RegressionData, fit_lm_cavi, fit_lm_gibbs, fit_lm_svi
from shrinkvi.specs import LmModelSpec


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 4))
    y = x @ np.array([1.0, -1.0, 0.0, 0.5]) + rng.normal(size=50)
    return RegressionData(X=x, y=y)


def test_variational_round_trip_bit_exact(data, tmp_path):
    fit = fit_lm_cavi(data, LmModelSpec(prior="horseshoe"), n_iter=40)
    path = tmp_path / "fit.json"
    save_artifact(fit, {"seed": 1}, path)
    loaded, meta = load_artifact(path)
    np.testing.assert_array_equal(loaded.coef_mean(), fit.coef_mean())
    np.testing.assert_array_equal(loaded.b["sigma_mat"], fit.b["sigma_mat"])
    np.testing.assert_array_equal(loaded.elbo, fit.elbo)
    assert loaded.b0 == fit.b0
    assert loaded.tau == fit.tau
    assert loaded.lam == fit.lam
    assert loaded.prior == "horseshoe" and loaded.link == "lm"
    assert loaded.converged == fit.converged and loaded.converged_at == fit.converged_at
    assert meta["seed"] == 1


def test_independent_family_round_trip(data, tmp_path):
    fit = fit_lm_svi(data, LmModelSpec(prior="lasso", coeff_family="independent"),
                     n_iter=30, batch_size=10, seed=2)
    path = tmp_path / "fit.json"
    save_artifact(fit, {}, path)
    loaded, _ = load_artifact(path)
    np.testing.assert_array_equal(np.asarray(loaded.b["var"]), np.asarray(fit.b["var"]))
    assert loaded.algorithm == "svi"
    assert loaded.coeff_family == "independent"


def test_gibbs_round_trip_bit_exact(data, tmp_path):
    draws = fit_lm_gibbs(data, LmModelSpec(prior="lasso"), n_iter=60, burn_in=30, seed=0)
    path = tmp_path / "g.json"
    save_artifact(draws, {"n_iter": 60}, path)
    loaded, meta = load_artifact(path)
    np.testing.assert_array_equal(loaded.b, draws.b)
    np.testing.assert_array_equal(loaded.b0, draws.b0)
    np.testing.assert_array_equal(loaded.tau, draws.tau)
    np.testing.assert_array_equal(loaded.local_scales, draws.local_scales)
    assert meta["n_iter"] == 60


def test_artifact_structure(data, tmp_path):
    fit = fit_lm_cavi(data, LmModelSpec(), n_iter=10)
    doc = artifact_dict(fit, {"seed": 0})
    assert doc["schema_version"] == SCHEMA_VERSION
    for key in ("b0", "b", "tau", "lambda", "elbo", "meta"):
        assert key in doc
    assert doc["b0"]["dist"] == "normal"
    assert doc["b"]["dist"] == "multivariate normal"
    # everything must be plain JSON types
    json.dumps(doc, allow_nan=False)


def test_unknown_schema_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 999, "kind": "variational"}))
    with pytest.raises(DomainError):
        load_artifact(path)


def test_unserializable_object_rejected(tmp_path):
    with pytest.raises(DomainError):
        artifact_dict(object(), {})

import numpy as np
import pytest
from scipy import stats

from shrinkvi.engine import StepSchedule
from shrinkvi.errors import DomainError
from shrinkvi.expfam import GaussianNatural
from shrinkvi.probit import (
    BinaryData,
    LatentState,
    fit_probit_cavi,
    fit_probit_gibbs,
    fit_probit_svi,
    natural_gradient_b,
    svi_step_b,
    update_latents,
)
from shrinkvi.specs import LmModelSpec


def make_data(seed=0, n=300, p=5, b=None):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, p))
    if b is None:
        b = np.array([1.5, -1.0, 0.0, 0.5, 0.0])[:p]
    y = ((0.2 + x @ b + rng.normal(size=n)) > 0).astype(int)
    return BinaryData(X=x, y=y), b


def test_update_latents_matches_truncnorm_oracle():
    data, b = make_data(0, n=50)
    state = update_latents(data, b, 0.2)
    lin = 0.2 + data.X @ b
    for i in range(50):
        if data.y[i] == 1:
            expect = stats.truncnorm.mean(-lin[i], np.inf, loc=lin[i], scale=1.0)
        else:
            expect = stats.truncnorm.mean(-np.inf, -lin[i], loc=lin[i], scale=1.0)
        assert state.z_mean[i] == pytest.approx(expect, rel=1e-9)
    # latents always sit on the observed side
    assert np.all((state.z_mean > 0) == (data.y == 1))


def test_natural_gradient_zero_at_optimum():
    data, b = make_data(1, n=40)
    latents = update_latents(data, b, 0.0)
    e_lambda = 2.0
    target = GaussianNatural(
        eta1=data.X.T @ latents.z_mean,
        eta2=-0.5 * (data.X.T @ data.X + e_lambda * np.eye(data.n_coef)),
    )
    grad = natural_gradient_b(data, latents, e_lambda, target)
    np.testing.assert_array_equal(grad.eta1, np.zeros(data.n_coef))
    np.testing.assert_array_equal(grad.eta2, np.zeros((data.n_coef, data.n_coef)))


def test_single_point_targets_average_to_full_target():
    # integer-valued inputs make the N/S scaling an exact arithmetic identity
    rng = np.random.default_rng(2)
    n, p = 10, 3
    x = rng.integers(-3, 4, size=(n, p)).astype(float)
    z = rng.integers(-5, 6, size=n).astype(float)
    current = GaussianNatural(eta1=np.zeros(p), eta2=-0.5 * np.eye(p))
    full = svi_step_b(x, z, 1.0, current, rho=1.0, n_total=n)
    ones = [svi_step_b(x[i : i + 1], z[i : i + 1], 1.0, current, rho=1.0, n_total=n)
            for i in range(n)]
    np.testing.assert_array_equal(np.mean([o.eta1 for o in ones], axis=0), full.eta1)
    np.testing.assert_array_equal(np.mean([o.eta2 for o in ones], axis=0), full.eta2)


def test_svi_step_blends():
    current = GaussianNatural(eta1=np.array([2.0]), eta2=np.array([[-1.0]]))
    x = np.array([[1.0]])
    out = svi_step_b(x, np.array([3.0]), 1.0, current, rho=0.5, n_total=1)
    # target: eta1 = 3, eta2 = -0.5 * (1 + 1) = -1
    assert out.eta1[0] == pytest.approx(0.5 * 2.0 + 0.5 * 3.0)
    assert out.eta2[0, 0] == pytest.approx(-1.0)


def test_svi_step_validation():
    current = GaussianNatural(eta1=np.zeros(2), eta2=-0.5 * np.eye(2))
    with pytest.raises(DomainError):
        svi_step_b(np.empty((0, 2)), np.empty(0), 1.0, current, 0.5, 10)
    with pytest.raises(DomainError):
        svi_step_b(np.ones((11, 2)), np.ones(11), 1.0, current, 0.5, 10)


def test_cavi_elbo_monotone_and_recovers_signs():
    data, b = make_data(3)
    for prior in ("ridge", "lasso", "horseshoe"):
        fit = fit_probit_cavi(data, LmModelSpec(prior=prior), n_iter=300)
        diffs = np.diff(fit.elbo)
        slack = 1e-8 * np.maximum(1.0, np.abs(fit.elbo[:-1]))
        assert np.all(diffs >= -slack), f"probit {prior} ELBO decreased"
        strong = np.abs(b) >= 0.5
        assert np.all(np.sign(fit.coef_mean()[strong]) == np.sign(b[strong]))


def test_cavi_independent_family():
    data, _ = make_data(4)
    fit = fit_probit_cavi(data, LmModelSpec(prior="horseshoe", coeff_family="independent"), n_iter=300)
    assert fit.b["dist"] == "independent normal"
    diffs = np.diff(fit.elbo)
    assert np.all(diffs >= -1e-8 * np.maximum(1.0, np.abs(fit.elbo[:-1])))


def test_svi_full_batch_rho_one_equals_cavi():
    data, _ = make_data(5)
    spec = LmModelSpec(prior="ridge")
    cavi = fit_probit_cavi(data, spec, n_iter=4)
    svi = fit_probit_svi(data, spec, n_iter=4, batch_size=data.n_obs,
                         schedule=StepSchedule.constant(1.0), seed=3)
    np.testing.assert_allclose(svi.coef_mean(), cavi.coef_mean(), rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(svi.b["sigma_mat"], cavi.b["sigma_mat"], rtol=1e-8, atol=1e-12)


def test_gibbs_recovers_signs_and_determinism():
    data, b = make_data(6, n=400)
    spec = LmModelSpec(prior="ridge")
    draws = fit_probit_gibbs(data, spec, n_iter=600, burn_in=300, seed=0)
    strong = np.abs(b) >= 1.0
    assert np.all(np.sign(draws.coef_mean()[strong]) == np.sign(b[strong]))
    again = fit_probit_gibbs(data, spec, n_iter=600, burn_in=300, seed=0)
    np.testing.assert_array_equal(draws.b, again.b)
    assert np.all(draws.tau == 1.0)  # probit fixes the residual precision


def test_probit_fit_has_no_tau_factor():
    data, _ = make_data(7, n=100)
    fit = fit_probit_cavi(data, LmModelSpec(prior="ridge"), n_iter=20)
    assert fit.tau is None
    assert fit.link == "probit"


def test_binary_data_validation():
    x = np.ones((4, 2))
    with pytest.raises(DomainError):
        BinaryData(X=x, y=[0, 1, 2, 0])
    with pytest.raises(DomainError):
        BinaryData(X=x, y=[0, 1, 1])
    with pytest.raises(DomainError):
        update_latents(BinaryData(X=x, y=[0, 1, 1, 0]), np.zeros(3), 0.0)


def test_latent_state_is_frozen():
    state = LatentState(z_mean=np.ones(3))
    with pytest.raises(AttributeError):
        state.z_mean = np.zeros(3)

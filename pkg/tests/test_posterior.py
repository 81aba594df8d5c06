import numpy as np
import pytest
from scipy import special, stats

from shrinkvi.errors import DomainError
from shrinkvi.posterior import predict_lm, predict_probit, summarize_gibbs, summarize_vi
from shrinkvi.results import GibbsDraws, VariationalFit


def vi_fit(mu, sigma, b0_mu=0.5, b0_var=0.04, tau=None, link="lm"):
    return VariationalFit(
        b0={"dist": "normal", "mu": b0_mu, "var": b0_var},
        b={"dist": "multivariate normal", "mu": np.asarray(mu, float), "sigma_mat": np.asarray(sigma, float)},
        lam={"dist": "gamma", "shape": 1.0, "rate": 1.0},
        elbo=np.array([-1.0]),
        tau=tau,
        link=link,
    )


def test_summarize_vi_gaussian_interval_oracle():
    fit = vi_fit([1.0, -2.0], [[0.25, 0.0], [0.0, 1.0]])
    table = summarize_vi(fit, level=0.9)
    z = stats.norm.ppf(0.95)
    assert table.names == ["Intercept", "b1", "b2"]
    np.testing.assert_allclose(table.estimate, [0.5, 1.0, -2.0])
    np.testing.assert_allclose(table.lower, [0.5 - z * 0.2, 1.0 - z * 0.5, -2.0 - z * 1.0])
    np.testing.assert_allclose(table.upper, [0.5 + z * 0.2, 1.0 + z * 0.5, -2.0 + z * 1.0])


def test_summarize_vi_custom_names():
    fit = vi_fit([1.0], [[1.0]])
    table = summarize_vi(fit, names=["slope"])
    assert table.names == ["Intercept", "slope"]
    with pytest.raises(DomainError):
        summarize_vi(fit, names=["a", "b"])


def test_summarize_gibbs_quantile_oracle():
    rng = np.random.default_rng(0)
    draws = GibbsDraws(
        b0=rng.normal(size=500),
        b=rng.normal(size=(500, 2)),
        tau=np.ones(500),
        lam=np.ones(500),
    )
    table = summarize_gibbs(draws, level=0.8)
    np.testing.assert_allclose(table.estimate[1], draws.b[:, 0].mean())
    np.testing.assert_allclose(table.lower[1], np.quantile(draws.b[:, 0], 0.1))
    np.testing.assert_allclose(table.upper[2], np.quantile(draws.b[:, 1], 0.9))


def test_summarize_gibbs_needs_two_draws():
    draws = GibbsDraws(b0=np.zeros(1), b=np.zeros((1, 2)), tau=np.ones(1), lam=np.ones(1))
    with pytest.raises(DomainError):
        summarize_gibbs(draws)


def test_level_validation():
    fit = vi_fit([0.0], [[1.0]])
    for level in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            summarize_vi(fit, level=level)


def test_predict_lm_variance_decomposition():
    sigma = np.array([[0.5, 0.1], [0.1, 0.3]])
    tau = {"dist": "gamma", "shape": 3.0, "rate": 4.0}
    fit = vi_fit([1.0, 2.0], sigma, b0_mu=0.5, b0_var=0.04, tau=tau)
    x = np.array([[1.0, -1.0], [2.0, 0.0]])
    pred = predict_lm(fit, x, level=0.95)
    est = 0.5 + x @ np.array([1.0, 2.0])
    # noise variance E[1/tau] = rate / (shape - 1) = 2
    var = 0.04 + np.einsum("ij,jk,ik->i", x, sigma, x) + 2.0
    z = stats.norm.ppf(0.975)
    np.testing.assert_allclose(pred.estimate, est)
    np.testing.assert_allclose(pred.ci_lower, est - z * np.sqrt(var))
    np.testing.assert_allclose(pred.ci_upper, est + z * np.sqrt(var))


def test_predict_lm_point_mass_tau():
    fit = vi_fit([1.0], [[0.0004]], b0_var=0.0001, tau={"dist": "point", "value": 4.0})
    pred = predict_lm(fit, np.array([[0.0]]))
    width = pred.ci_upper[0] - pred.ci_lower[0]
    assert width == pytest.approx(2 * stats.norm.ppf(0.975) * np.sqrt(0.0001 + 0.25), rel=1e-9)


def test_predict_lm_heavy_tailed_tau_falls_back_to_plugin():
    # shape <= 1 has no finite E[1/tau]; the plug-in rate/shape is used
    fit = vi_fit([1.0], [[1e-12]], b0_var=1e-12, tau={"dist": "gamma", "shape": 0.5, "rate": 2.0})
    pred = predict_lm(fit, np.array([[0.0]]))
    half = (pred.ci_upper[0] - pred.ci_lower[0]) / 2
    assert half == pytest.approx(stats.norm.ppf(0.975) * 2.0, rel=1e-5)


def test_predict_probit_formula():
    sigma = np.array([[0.2, 0.0], [0.0, 0.1]])
    fit = vi_fit([1.0, -1.0], sigma, b0_mu=0.0, b0_var=0.05, link="probit")
    x = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
    probs = predict_probit(fit, x)
    m = x @ np.array([1.0, -1.0])
    v = 0.05 + np.einsum("ij,jk,ik->i", x, sigma, x)
    np.testing.assert_allclose(probs, special.ndtr(m / np.sqrt(1.0 + v)))
    assert np.all((probs > 0) & (probs < 1))


def test_predict_shape_validation():
    fit = vi_fit([1.0, 2.0], np.eye(2))
    with pytest.raises(DomainError):
        predict_lm(fit, np.ones((3, 3)))
    with pytest.raises(DomainError):
        predict_probit(fit, np.ones(2))


def test_independent_family_prediction_uses_diagonal_variance():
    fit = VariationalFit(
        b0={"dist": "normal", "mu": 0.0, "var": 0.0},
        b={"dist": "independent normal", "mu": np.array([1.0, 1.0]), "var": np.array([0.5, 2.0])},
        lam={"dist": "gamma", "shape": 1.0, "rate": 1.0},
        elbo=np.array([0.0]),
        tau={"dist": "point", "value": 1e12},
    )
    pred = predict_lm(fit, np.array([[1.0, 1.0]]))
    half = (pred.ci_upper[0] - pred.ci_lower[0]) / 2
    assert half == pytest.approx(stats.norm.ppf(0.975) * np.sqrt(2.5 + 1e-12), rel=1e-6)

import numpy as np
import pytest
from scipy import stats

from shrinkvi.errors import DomainError
from shrinkvi.shrinkage import (
    HorseshoeGibbs,
    LassoGibbs,
    RidgeGibbs,
    make_gibbs_prior,
    make_vi_prior,
)
from shrinkvi.specs import PriorHyper

HYPER = PriorHyper()


def test_ridge_vi_full_update_is_conjugate():
    block = make_vi_prior("ridge", 4, HYPER, None)
    e_b2 = np.array([1.0, 2.0, 3.0, 4.0])
    block.step(e_b2, rho=1.0)
    # oracle: q(lambda) = Gamma(a0 + P/2, b0 + sum E[b^2]/2)
    assert block.lam.shape == pytest.approx(HYPER.a_lambda + 2.0)
    assert block.lam.rate == pytest.approx(HYPER.b_lambda + 5.0)
    np.testing.assert_allclose(block.prec_diag(), np.full(4, block.lam.mean))


def test_ridge_vi_partial_step_blends():
    block = make_vi_prior("ridge", 2, HYPER, None)
    s0, r0 = block.lam.shape, block.lam.rate
    block.step(np.array([1.0, 1.0]), rho=0.25)
    assert block.lam.shape == pytest.approx(0.75 * s0 + 0.25 * (HYPER.a_lambda + 1.0))
    assert block.lam.rate == pytest.approx(0.75 * r0 + 0.25 * (HYPER.b_lambda + 1.0))


def test_lasso_vi_local_moments():
    block = make_vi_prior("lasso", 3, HYPER, fixed_lambda=4.0)
    e_b2 = np.array([0.25, 1.0, 4.0])
    block.step(e_b2, rho=1.0)
    # a_p = E[lambda] E[b_p^2]; E[g_p] = a_p^{-1/2}
    np.testing.assert_allclose(block.a_local, 4.0 * e_b2)
    np.testing.assert_allclose(block.e_gamma(), 1.0 / np.sqrt(4.0 * e_b2))
    # expected prior precision of b_p is E[lambda] E[g_p]
    np.testing.assert_allclose(block.prec_diag(), 4.0 / np.sqrt(4.0 * e_b2))


def test_lasso_vi_lambda_update_uses_expected_gamma():
    block = make_vi_prior("lasso", 2, HYPER, None)
    e_b2 = np.array([1.0, 2.0])
    block.step(e_b2, rho=1.0)
    assert block.lam.shape == pytest.approx(HYPER.a_lambda + 1.0)
    assert block.lam.rate == pytest.approx(HYPER.b_lambda + 0.5 * float(block.e_gamma() @ e_b2))


def test_horseshoe_vi_scale_updates():
    block = make_vi_prior("horseshoe", 2, HYPER, None)
    e_b2 = np.array([1.0, 4.0])
    # record pre-update reciprocals used by the sequential sweep
    nu_recip_before = [f.mean_recip for f in block.nu]
    t2_recip_before = block.t2.mean_recip
    xi_recip_before = block.xi.mean_recip
    block.step(e_b2, rho=1.0)
    # l2_p scale target: E[1/nu_p] + E[b_p^2] E[1/t2] / 2
    for p in range(2):
        assert block.l2[p].scale == pytest.approx(nu_recip_before[p] + 0.5 * e_b2[p] * t2_recip_before)
        # nu_p target uses the freshly updated l2_p
        assert block.nu[p].scale == pytest.approx(1.0 + block.l2[p].mean_recip)
    recip_l2 = np.array([f.mean_recip for f in block.l2])
    assert block.t2.scale == pytest.approx(xi_recip_before + 0.5 * float(e_b2 @ recip_l2))
    assert block.xi.scale == pytest.approx(1.0 + block.t2.mean_recip)
    # shapes are fixed by conjugacy
    assert block.t2.shape == pytest.approx(0.5 * (2 + 1))
    assert all(f.shape == 1.0 for f in block.l2 + block.nu)


def test_horseshoe_prec_diag():
    block = make_vi_prior("horseshoe", 3, HYPER, None)
    expected = block.t2.mean_recip * np.array([f.mean_recip for f in block.l2])
    np.testing.assert_allclose(block.prec_diag(), expected)


def test_horseshoe_rejects_fixed_lambda():
    with pytest.raises(DomainError):
        make_vi_prior("horseshoe", 2, HYPER, fixed_lambda=1.0)
    with pytest.raises(DomainError):
        make_gibbs_prior("horseshoe", 2, HYPER, fixed_lambda=1.0)


def test_unknown_prior_rejected():
    with pytest.raises(DomainError):
        make_vi_prior("spike", 2, HYPER, None)


def test_ridge_gibbs_lambda_conditional():
    rng = np.random.default_rng(0)
    block = RidgeGibbs(5, HYPER, None)
    b = np.array([1.0, -1.0, 0.5, 0.0, 2.0])
    draws = []
    for _ in range(20000):
        block.sample(b, rng)
        draws.append(block.lambda_value())
    shape = HYPER.a_lambda + 2.5
    rate = HYPER.b_lambda + 0.5 * float(b @ b)
    assert np.mean(draws) == pytest.approx(shape / rate, rel=0.05)
    _, pvalue = stats.kstest(draws[::10], stats.gamma(a=shape, scale=1.0 / rate).cdf)
    assert pvalue > 1e-4


def test_lasso_gibbs_local_conditional_is_inverse_gaussian():
    rng = np.random.default_rng(1)
    block = LassoGibbs(1, HYPER, fixed_lambda=4.0)
    b = np.array([0.5])
    draws = np.array([(block.sample(b, rng), block.local_values()[0])[1] for _ in range(20000)])
    mean = 1.0 / (np.sqrt(4.0) * 0.5)  # 1 / (sqrt(lambda) |b|)
    _, pvalue = stats.kstest(draws[::10], stats.invgauss(mu=mean, scale=1.0).cdf)
    assert pvalue > 1e-4


def test_lasso_gibbs_guards_tiny_coefficients():
    rng = np.random.default_rng(2)
    block = LassoGibbs(2, HYPER, None)
    block.sample(np.array([0.0, 1e-300]), rng)
    assert np.all(np.isfinite(block.local_values()))
    assert np.isfinite(block.lambda_value())


def test_horseshoe_gibbs_local_conditional():
    # l2_p | . ~ InvGamma(1, 1/nu_p + b_p^2 / (2 t2)); with nu=1, t2=1 frozen
    # the reciprocal is Exponential with rate equal to the scale
    rng = np.random.default_rng(3)
    b = np.array([1.0, -2.0])
    scales = 1.0 + 0.5 * b * b
    n = 20000
    draws = np.empty((n, 2))
    for i in range(n):
        block = HorseshoeGibbs(2)
        block.sample(b, rng)
        draws[i] = block.l2
    np.testing.assert_allclose((1.0 / draws).mean(axis=0), 1.0 / scales, rtol=0.05)
    _, pvalue = stats.kstest(draws[::10, 0], stats.invgamma(a=1.0, scale=scales[0]).cdf)
    assert pvalue > 1e-4


def test_horseshoe_gibbs_global_conditional_mean():
    # 1/t2 | . ~ Gamma((P+1)/2, 1/xi + sum(b^2 / l2)/2) with the freshly
    # drawn l2; check against the analytic conditional mean per sweep
    rng = np.random.default_rng(4)
    b = np.array([0.5, -1.0, 2.0])
    n = 20000
    err = np.empty(n)
    for i in range(n):
        block = HorseshoeGibbs(3)
        block.sample(b, rng)
        shape = 0.5 * (3 + 1)
        # xi was 1 before the t2 draw
        scale = 1.0 + 0.5 * float(np.sum(b * b / block.l2))
        err[i] = 1.0 / block.t2 - shape / scale
    assert abs(err.mean()) < 4 * err.std() / np.sqrt(n)


def test_gibbs_prec_diag_shapes():
    for prior in ("ridge", "lasso", "horseshoe"):
        block = make_gibbs_prior(prior, 4, HYPER, None)
        assert block.prec_diag().shape == (4,)
        assert np.all(block.prec_diag() > 0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkvi.errors import DomainError
from shrinkvi.expfam import (
    GammaNatural,
    GaussianMoment,
    GaussianNatural,
    blend_gamma,
    blend_natural,
    gaussian_from_natural,
    gaussian_to_natural,
)


def _random_spd(rng, n):
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)


def test_natural_round_trip_matches_moments():
    rng = np.random.default_rng(0)
    for n in (1, 3, 6):
        mu = rng.normal(size=n)
        sigma = _random_spd(rng, n)
        nat = gaussian_to_natural(GaussianMoment(mu, sigma))
        # oracle: eta1 = sigma^{-1} mu, eta2 = -1/2 sigma^{-1}
        prec = np.linalg.inv(sigma)
        np.testing.assert_allclose(nat.eta1, prec @ mu, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(nat.eta2, -0.5 * prec, rtol=1e-9, atol=1e-9)
        back = gaussian_from_natural(nat)
        np.testing.assert_allclose(back.mu, mu, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(back.sigma, sigma, rtol=1e-8, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(
    mu=st.floats(-50, 50),
    var=st.floats(1e-3, 1e3),
    mu2=st.floats(-50, 50),
    var2=st.floats(1e-3, 1e3),
    rho=st.floats(0.01, 1.0),
)
def test_blend_stays_in_family_scalar(mu, var, mu2, var2, rho):
    a = gaussian_to_natural(GaussianMoment([mu], [[var]]))
    b = gaussian_to_natural(GaussianMoment([mu2], [[var2]]))
    blended = blend_natural(a, b, rho)
    back = gaussian_from_natural(blended)
    assert back.sigma[0, 0] > 0
    # precision blends linearly
    expected_prec = (1 - rho) / var + rho / var2
    np.testing.assert_allclose(-2 * blended.eta2[0, 0], expected_prec, rtol=1e-9)


def test_blend_rho_one_returns_target():
    rng = np.random.default_rng(1)
    a = gaussian_to_natural(GaussianMoment(rng.normal(size=2), _random_spd(rng, 2)))
    b = gaussian_to_natural(GaussianMoment(rng.normal(size=2), _random_spd(rng, 2)))
    out = blend_natural(a, b, 1.0)
    np.testing.assert_array_equal(out.eta1, b.eta1)
    np.testing.assert_array_equal(out.eta2, b.eta2)


def test_blend_gamma_is_linear_in_shape_and_rate():
    a = GammaNatural(shape_minus_one=1.0, neg_rate=-2.0)   # shape 2, rate 2
    b = GammaNatural(shape_minus_one=4.0, neg_rate=-10.0)  # shape 5, rate 10
    out = blend_gamma(a, b, 0.25)
    assert out.shape_minus_one + 1.0 == pytest.approx(0.75 * 2 + 0.25 * 5)
    assert -out.neg_rate == pytest.approx(0.75 * 2 + 0.25 * 10)


@pytest.mark.parametrize("rho", [0.0, -0.5, 1.5])
def test_invalid_step_size_rejected(rho):
    a = gaussian_to_natural(GaussianMoment([0.0], [[1.0]]))
    with pytest.raises(DomainError):
        blend_natural(a, a, rho)


def test_indefinite_covariance_rejected():
    with pytest.raises(DomainError):
        GaussianMoment([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])


def test_asymmetric_covariance_rejected():
    with pytest.raises(DomainError):
        GaussianMoment([0.0, 0.0], [[1.0, 0.5], [0.1, 1.0]])


def test_natural_requires_negative_definite_eta2():
    with pytest.raises(DomainError):
        GaussianNatural(eta1=[0.0], eta2=[[0.5]])


def test_gamma_natural_domain():
    with pytest.raises(DomainError):
        GammaNatural(shape_minus_one=-1.0, neg_rate=-1.0)
    with pytest.raises(DomainError):
        GammaNatural(shape_minus_one=0.0, neg_rate=0.0)


def test_dimension_mismatch_rejected():
    a = gaussian_to_natural(GaussianMoment([0.0], [[1.0]]))
    b = gaussian_to_natural(GaussianMoment([0.0, 0.0], np.eye(2)))
    with pytest.raises(DomainError):
        blend_natural(a, b, 0.5)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from conftest import ALL_SPECS, ASYM, BERN, EXPO, GAUSS, POIS
from ldpcheck.distributions import DistributionSpec, DomainError, mean, tilt
from ldpcheck.pressure import domain_sup, pressure, pressure_derivative, truncated_pressure


def _grid(spec, num=15):
    return np.linspace(-2.0, min(2.0, 0.9 * domain_sup(spec)), num)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_zero_at_origin(spec):
    assert pressure(spec, 0.0) == 0.0
    assert pressure_derivative(spec, 0.0) == pytest.approx(mean(spec), rel=1e-14, abs=1e-15)


def test_examples():
    assert pressure(BERN, 1.0) == pytest.approx(math.log((1 + math.e) / 2), rel=1e-15)
    assert pressure(EXPO, 1.0) == math.inf
    assert pressure(EXPO, 3.0) == math.inf
    assert pressure(GAUSS, 2.0) == 2.0
    assert pressure(POIS, 1.0) == pytest.approx(math.e - 1)
    assert pressure(ASYM, 0.5) == pytest.approx(math.log(0.5 * math.exp(-0.5) + 0.3 * math.e + 0.2 * math.exp(2.5)))
    assert pressure_derivative(GAUSS, 0.5) == 0.5
    assert pressure_derivative(BERN, math.log(3)) == pytest.approx(0.75, rel=1e-15)


def test_no_overflow_for_large_lambda():
    big = DistributionSpec.discrete([0.0, 1000.0], [0.5, 0.5])
    assert pressure(big, 5.0) == pytest.approx(5000 + math.log(0.5), rel=1e-15)
    assert pressure_derivative(big, 5.0) == pytest.approx(1000.0)
    assert pressure(POIS, 800.0) == math.inf


def test_derivative_domain_error():
    with pytest.raises(DomainError):
        pressure_derivative(EXPO, 1.0)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_derivative_matches_tilted_mean(spec):
    for lam in _grid(spec, 7):
        assert pressure_derivative(spec, lam) == pytest.approx(mean(tilt(spec, lam)), rel=1e-12)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_derivative_central_difference(spec):
    h = 1e-5
    for lam in _grid(spec)[1:-1]:
        fd = (pressure(spec, lam + h) - pressure(spec, lam - h)) / (2 * h)
        assert abs(pressure_derivative(spec, lam) - fd) <= 1e-5


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_convexity_on_grid(spec):
    lams = _grid(spec)
    p = [pressure(spec, l) for l in lams]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            for t in (0.1, 0.5, 0.9):
                mid = pressure(spec, t * lams[i] + (1 - t) * lams[j])
                assert mid <= t * p[i] + (1 - t) * p[j] + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 1),
       st.sampled_from([BERN, ASYM, GAUSS, POIS, DistributionSpec.bernoulli(0.03)]))
def test_convexity_property(a, b, t, spec):
    mid = pressure(spec, t * a + (1 - t) * b)
    assert mid <= t * pressure(spec, a) + (1 - t) * pressure(spec, b) + 1e-9


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_never_neg_inf(spec):
    for lam in np.linspace(-20, 20, 41):
        assert pressure(spec, lam) > -math.inf


class TestTruncated:
    def test_no_op_for_contained_support(self):
        assert truncated_pressure(BERN, 1.0, 2.0) == pressure(BERN, 1.0)

    def test_gaussian_window_mass(self):
        assert truncated_pressure(GAUSS, 0.0, 1.0) == pytest.approx(math.log(norm.cdf(1) - norm.cdf(-1)), abs=1e-9)
        assert math.exp(truncated_pressure(GAUSS, 0.0, 1.0)) == pytest.approx(0.682689, abs=1e-6)

    def test_atom_filter(self):
        assert truncated_pressure(ASYM, 0.0, 1.0) == pytest.approx(math.log(0.5), abs=1e-15)
        assert truncated_pressure(ASYM, 1.0, 0.5) == -math.inf

    def test_bad_K(self):
        with pytest.raises(ValueError):
            truncated_pressure(GAUSS, 1.0, 0.0)

    @pytest.mark.parametrize("mu, sigma, lam, K", [
        (0.0, 1.0, 1.0, 2.0), (0.3, 1.5, 2.0, 50.0), (0.3, 1.5, -1.0, 3.0), (-2.0, 0.2, 4.0, 1.0), (0, 1, 0.5, 1e3),
    ])
    def test_gaussian_closed_form(self, mu, sigma, lam, K):
        g = DistributionSpec.gaussian(mu, sigma)
        m = mu + lam * sigma ** 2
        want = pressure(g, lam) + math.log(norm.cdf((K - m) / sigma) - norm.cdf((-K - m) / sigma))
        assert truncated_pressure(g, lam, K) == pytest.approx(want, abs=1e-9)

    @pytest.mark.parametrize("theta, lam, K", [(2.0, 1.0, 2.0), (2.0, 3.0, 5.0), (2.0, -1.0, 0.3), (2.0, 1.9, 1e3),
                                               (1.0, 1.0, 4.0)])
    def test_exponential_closed_form(self, theta, lam, K):
        a = theta - lam
        want = math.log(theta * K) if a == 0 else math.log(theta / a * -math.expm1(-a * K))
        assert truncated_pressure(DistributionSpec.exponential(theta), lam, K) == pytest.approx(want, abs=1e-9)

    def test_poisson_partial_sum(self):
        th, lam, K = 2.0, 0.7, 4.5
        want = math.log(sum(math.exp(-th) * th ** k / math.factorial(k) * math.exp(lam * k) for k in range(5)))
        assert truncated_pressure(DistributionSpec.poisson(th), lam, K) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("spec, big", [(BERN, 2.0), (ASYM, 6.0), (GAUSS, 40.0), (EXPO, 200.0), (POIS, 100.0)])
    def test_monotone_and_convergent(self, spec, big):
        for lam in [l for l in (-1.0, 0.0, 0.5, 2.0) if l < 0.9 * domain_sup(spec)]:
            prev = -math.inf
            for K in np.linspace(0.25, big, 12):
                tp = truncated_pressure(spec, lam, float(K))
                assert tp >= prev - 1e-12
                prev = tp
            assert abs(truncated_pressure(spec, lam, big) - pressure(spec, lam)) <= 1e-6

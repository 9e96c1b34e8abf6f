"""Lattice-sum identity tests: truncation correctness of the inner sum,
agreement with an adaptive-quadrature oracle, and the continuum limit."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pickands.exceptions import ParameterError
from pickands.identity import identity_integrand, identity_integral


def brute_inner_sum(y, eta, k_range=5000):
    ks = np.arange(-k_range, k_range + 1, dtype=float)
    exponents = eta * eta * (ks * y - ks * ks)
    m = exponents.max()
    return math.exp(m) * np.sum(np.exp(exponents - m))


class TestIntegrand:
    @pytest.mark.parametrize("eta", [0.25, 0.5, 1.0])
    @pytest.mark.parametrize("y", [0.0, 0.7, 3.3, 17.0])
    def test_truncated_sum_matches_brute_force(self, eta, y):
        val = identity_integrand(y, eta)
        assert math.isclose(val, 1.0 / brute_inner_sum(y, eta), rel_tol=1e-13)

    def test_even_in_y(self):
        for y in (0.3, 1.9, 6.0):
            assert math.isclose(
                identity_integrand(y, 0.5), identity_integrand(-y, 0.5), rel_tol=1e-13
            )

    def test_small_eta_continuum_sum(self):
        # sum -> (sqrt(pi)/eta) * exp(eta^2 y^2 / 4) as eta -> 0
        eta = 0.05
        for y in (0.0, 2.0, 10.0):
            sum_val = 1.0 / identity_integrand(y, eta)
            continuum = math.sqrt(math.pi) / eta * math.exp(eta * eta * y * y / 4.0)
            assert math.isclose(sum_val, continuum, rel_tol=1e-6)


class TestIntegral:
    @pytest.mark.parametrize("eta", [0.25, 0.5, 1.0])
    def test_equals_two(self, eta):
        assert abs(identity_integral(eta) - 2.0) <= 1e-4

    def test_matches_quadrature_oracle(self):
        eta = 0.5
        oracle, _ = quad(
            lambda y: identity_integrand(y, eta),
            0.0,
            60.0,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=500,
        )
        assert math.isclose(identity_integral(eta), 2.0 * oracle, rel_tol=1e-9)

    def test_deterministic(self):
        assert identity_integral(0.5) == identity_integral(0.5)

    def test_invalid_eta(self):
        with pytest.raises(ParameterError):
            identity_integral(0.0)

"""Luxemburg root-finding, norms and seminorms."""

import math

import numpy as np
import pytest
from scipy import integrate

from discretization import (
    ModularSamples, NodalField, interpolate, make_mesh, modular_value,
    sample_fractional, sample_gradient, sample_local,
)
from errors import ConvergenceError, InvalidParameterError
from orlicz_norms import luxemburg, norm_G, seminorm_sG


def _samples(magnitudes, weights):
    return ModularSamples(np.asarray(magnitudes, dtype=float),
                          np.asarray(weights, dtype=float), 'local')


class _Reciprocal:
    """Not a Young function: G(t) = 1/t makes the modular increase in tau."""
    spec_string = 'reciprocal'

    def G(self, t):
        return 1.0 / np.asarray(t)

    def g(self, t):
        return -1.0 / np.asarray(t) ** 2


class _Constant:
    spec_string = 'constant'

    def G(self, t):
        return np.full_like(np.asarray(t, dtype=float), 2.0)

    def g(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


class TestLuxemburg:

    def test_single_entry(self, quadratic):
        # 1 * (2 / tau)^2 / 2 = 1
        result = luxemburg(_samples([2.0], [1.0]), quadratic)
        assert result.tau == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert result.residual <= 1e-12

    def test_zero_magnitudes(self, quadratic):
        result = luxemburg(_samples([0.0, 0.0], [1.0, 2.0]), quadratic)
        assert result.tau == 0.0

    def test_quadratic_closed_form(self, quadratic, rng):
        m = rng.uniform(0.0, 5.0, 40)
        w = rng.uniform(0.1, 1.0, 40)
        tau = luxemburg(_samples(m, w), quadratic).tau
        assert tau == pytest.approx(math.sqrt(float(np.dot(w, m ** 2)) / 2.0), rel=1e-12)

    @pytest.mark.parametrize("spec_fixture", ['cubic', 'subquadratic', 'power_sum', 'power_log'])
    def test_unit_modular(self, spec_fixture, request, rng):
        Y = request.getfixturevalue(spec_fixture)
        samples = _samples(rng.exponential(3.0, 50), rng.uniform(0.01, 0.1, 50))
        result = luxemburg(samples, Y)
        assert modular_value(samples, Y, result.tau) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("c", [1e-6, 0.3, -2.0, 1e5])
    def test_homogeneity(self, power_sum, rng, c):
        samples = _samples(rng.uniform(0.0, 2.0, 30), rng.uniform(0.1, 1.0, 30))
        tau = luxemburg(samples, power_sum).tau
        assert luxemburg(samples.scaled(c), power_sum).tau == pytest.approx(abs(c) * tau, rel=1e-10)

    def test_tolerance_must_be_positive(self, quadratic):
        with pytest.raises(InvalidParameterError):
            luxemburg(_samples([1.0], [1.0]), quadratic, tol=0.0)

    def test_increasing_modular_is_reported(self):
        with pytest.raises(ConvergenceError) as info:
            luxemburg(_samples([2.0], [1.0]), _Reciprocal())
        assert 'previous_excess' in info.value.diagnostics

    def test_budget_exhaustion(self):
        with pytest.raises(ConvergenceError):
            luxemburg(_samples([1.0], [1.0]), _Constant(), max_iters=20)


class TestNorms:

    def test_power_closed_form(self, cubic):
        # ||u||_G = ||u||_3 / 3^{1/3} for G = t^3/3
        mesh = make_mesh(0.0, 1.0, 16)
        u = interpolate(lambda x: x * (1.0 - x), mesh)
        cube = sum(integrate.quad(lambda x: u(x) ** 3, lo, hi, epsabs=0, epsrel=1e-13)[0]
                   for lo, hi in zip(mesh.nodes[:-1], mesh.nodes[1:]))
        assert norm_G(u, cubic) == pytest.approx(cube ** (1.0 / 3.0) / 3.0 ** (1.0 / 3.0),
                                                 rel=1e-10)

    def test_gradient_seminorm_of_hat(self, quadratic):
        # 2 elements * 0.5 * (2/tau)^2 / 2 = 1 gives tau = sqrt(2)
        u = NodalField(make_mesh(0.0, 1.0, 2), np.array([1.0]))
        assert seminorm_sG(u, quadratic, 1.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_sine_quotient_is_pi(self, quadratic, sine_field):
        u = sine_field(512)
        ratio = seminorm_sG(u, quadratic, 1.0) / norm_G(u, quadratic)
        assert ratio == pytest.approx(math.pi, rel=1e-4)

    def test_fractional_quadratic_closed_form(self, quadratic, mesh16, random_field):
        u = random_field(mesh16)
        samples = sample_fractional(u, 0.4)
        expected = math.sqrt(float(np.dot(samples.weights, samples.magnitudes ** 2)) / 2.0)
        assert seminorm_sG(u, quadratic, 0.4) == pytest.approx(expected, rel=1e-11)

    def test_triangle_inequality(self, power_sum, mesh16, rng):
        for _ in range(100):
            u = NodalField(mesh16, rng.standard_normal(mesh16.n_interior))
            v = NodalField(mesh16, rng.standard_normal(mesh16.n_interior))
            w = NodalField(mesh16, u.coefficients + v.coefficients)
            assert norm_G(w, power_sum) <= norm_G(u, power_sum) + norm_G(v, power_sum) + 1e-8
            assert (seminorm_sG(w, power_sum, 1.0)
                    <= seminorm_sG(u, power_sum, 1.0) + seminorm_sG(v, power_sum, 1.0) + 1e-8)

    def test_zero_field(self, quadratic, mesh16):
        u = NodalField(mesh16, np.zeros(mesh16.n_interior))
        assert norm_G(u, quadratic) == 0.0
        assert seminorm_sG(u, quadratic, 0.5) == 0.0

    @pytest.mark.parametrize("s", [0.0, 1.01])
    def test_order_outside_range(self, quadratic, hat16, s):
        with pytest.raises(InvalidParameterError):
            seminorm_sG(hat16, quadratic, s)

    def test_samples_feed_the_root(self, cubic, hat16):
        tau = norm_G(hat16, cubic)
        assert modular_value(sample_local(hat16), cubic, tau) == pytest.approx(1.0, abs=1e-10)
        tau_h = seminorm_sG(hat16, cubic, 1.0)
        assert modular_value(sample_gradient(hat16), cubic, tau_h) == pytest.approx(1.0, abs=1e-10)

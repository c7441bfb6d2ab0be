"""Meshes, nodal fields and the modular sample clouds."""

import math

import numpy as np
import pytest
from scipy import integrate

from discretization import (
    NodalField, QuadratureSpec, exterior_rule, field_rows, gauss_legendre,
    interpolate, make_mesh, modular_value, sample_cloud, sample_fractional,
    sample_gradient, sample_local,
)
from errors import InvalidIntervalError, InvalidParameterError, NonFiniteValueError


class TestMesh:

    def test_uniform_nodes(self):
        mesh = make_mesh(-1.0, 1.0, 8)
        assert mesh.h == 0.25
        assert mesh.n_interior == 7
        np.testing.assert_allclose(mesh.nodes, np.linspace(-1.0, 1.0, 9))

    @pytest.mark.parametrize("a,b,n", [(1.0, 0.0, 4), (0.0, 0.0, 4), (0.0, 1.0, 1),
                                       (0.0, math.inf, 4)])
    def test_invalid(self, a, b, n):
        with pytest.raises(InvalidIntervalError):
            make_mesh(a, b, n)


class TestFields:

    def test_interpolate_sine(self):
        u = interpolate(lambda x: math.sin(math.pi * x), make_mesh(0.0, 1.0, 4))
        np.testing.assert_allclose(u.coefficients, [math.sqrt(0.5), 1.0, math.sqrt(0.5)])

    def test_boundary_values_are_zero(self):
        u = interpolate(lambda x: 1.0, make_mesh(0.0, 1.0, 4))
        assert u.nodal_values()[0] == 0.0 and u.nodal_values()[-1] == 0.0
        assert u(-0.5) == 0.0 and u(0.5) == 1.0

    def test_non_finite(self):
        with pytest.raises(NonFiniteValueError):
            interpolate(lambda x: 1.0 / (x - 0.5), make_mesh(0.0, 1.0, 4))

    def test_wrong_length(self, mesh16):
        with pytest.raises(InvalidParameterError):
            NodalField(mesh16, np.ones(3))

    def test_field_rows(self):
        u = interpolate(lambda x: x * (1.0 - x), make_mesh(0.0, 1.0, 2))
        assert field_rows(u) == [{'x': 0.0, 'u': 0.0}, {'x': 0.5, 'u': 0.25},
                                 {'x': 1.0, 'u': 0.0}]


class TestRules:

    def test_gauss_legendre_on_unit_interval(self):
        x, w = gauss_legendre(4)
        assert w.sum() == pytest.approx(1.0)
        assert float(np.dot(w, x ** 7)) == pytest.approx(1.0 / 8.0)

    def test_quadrature_spec_validation(self):
        with pytest.raises(InvalidParameterError):
            QuadratureSpec(gauss_order=1)
        with pytest.raises(InvalidParameterError):
            QuadratureSpec(exterior_tol=0.0)

    @pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_exterior_rule_closed_form(self, s, p):
        # int_delta^inf (m d^-s)^p / p dd/d = m^p delta^-sp / (s p^2)
        delta, m = 0.03, 1.7
        scale, weights = exterior_rule(delta, s)
        value = float(np.dot(weights, (m * scale) ** p / p))
        assert value == pytest.approx(m ** p * delta ** (-s * p) / (s * p * p), rel=1e-9)

    def test_exterior_rule_matches_direct_integral(self, quadratic):
        # Exterior of (0, 1) seen from x = 0.8: y in (1, 1e6) plus the analytic tail
        s, c, x = 0.4, 0.6, 0.8
        scale, weights = exterior_rule(1.0 - x, s)
        rule = float(np.dot(weights, quadratic.G(c * scale)))

        def integrand(y):
            return quadratic.G(c / (y - x) ** s) / (y - x)

        pieces = [(1.0, 2.0), (2.0, 1e2), (1e2, 1e4), (1e4, 1e6)]
        direct = sum(integrate.quad(integrand, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
                     for lo, hi in pieces)
        tail = c ** 2 * (1e6 - x) ** (-2 * s) / (4 * s)
        assert rule == pytest.approx(direct + tail, rel=1e-8)


class TestLocalAndGradient:

    def test_local_zero_field(self, mesh16, quadratic):
        samples = sample_local(NodalField(mesh16, np.zeros(mesh16.n_interior)))
        assert not np.any(samples.magnitudes)
        assert modular_value(samples, quadratic, 1.0) == 0.0

    def test_local_hat_is_exact(self, quadratic):
        mesh = make_mesh(0.0, 1.0, 2)
        u = NodalField(mesh, np.array([1.0]))
        assert modular_value(sample_local(u), quadratic, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-14)

    def test_magnitudes_scale(self, mesh16, random_field):
        u = random_field(mesh16)
        base = sample_local(u).magnitudes
        scaled = sample_local(u.with_coefficients(-3.0 * u.coefficients)).magnitudes
        np.testing.assert_allclose(scaled, 3.0 * base, rtol=1e-14)

    def test_gradient_hat(self, quadratic):
        u = NodalField(make_mesh(0.0, 1.0, 2), np.array([1.0]))
        samples = sample_gradient(u)
        np.testing.assert_allclose(samples.magnitudes, [2.0, 2.0])
        np.testing.assert_allclose(samples.weights, [0.5, 0.5])
        assert modular_value(samples, quadratic, 1.0) == pytest.approx(quadratic.G(2.0))

    def test_gradient_matches_element_slopes(self, mesh16, random_field, cubic):
        u = random_field(mesh16)
        slopes = np.abs(np.diff(u.nodal_values())) / mesh16.h
        expected = mesh16.h * float(np.sum(cubic.G(slopes / 0.7)))
        assert modular_value(sample_gradient(u), cubic, 0.7) == pytest.approx(expected, rel=1e-13)

    def test_tau_must_be_positive(self, mesh16, hat16, quadratic):
        with pytest.raises(InvalidParameterError):
            modular_value(sample_local(hat16), quadratic, 0.0)

    def test_unknown_kind(self, mesh16):
        with pytest.raises(InvalidParameterError):
            sample_cloud(mesh16, 'spectral')


class TestFractional:

    def test_zero_field(self, mesh16, quadratic):
        u = NodalField(mesh16, np.zeros(mesh16.n_interior))
        assert modular_value(sample_fractional(u, 0.5), quadratic, 1.0) == 0.0

    @pytest.mark.parametrize("s", [0.0, 1.0, -0.2, 1.5])
    def test_order_outside_range(self, hat16, s):
        with pytest.raises(InvalidParameterError):
            sample_fractional(hat16, s)

    def test_weights_positive(self, mesh16):
        cloud = sample_cloud(mesh16, 'fractional', 0.3, QuadratureSpec())
        assert np.all(cloud.weights > 0) and np.all(np.isfinite(cloud.weights))
        assert cloud.operator.shape == (cloud.size, mesh16.n_interior)

    def test_hat_against_closed_form(self, hat16, quadratic):
        # For s = 1/2 and G = t^2/2 the modular of a hat basis function is 2 log 2
        # at every mesh width. The reference below recomputes it from the split
        # (support x support) + (support x complement) with scipy quadrature.
        cross = integrate.dblquad(lambda b, a: (b - a) ** 2 / (a + b) ** 2,
                                  0.0, 1.0, lambda a: 0.0, lambda a: 1.0,
                                  epsabs=0, epsrel=1e-12)[0]
        outer = integrate.quad(lambda xi: (1.0 - abs(xi - 1.0)) ** 2 / xi, 0.0, 2.0,
                               points=[1.0], epsabs=0, epsrel=1e-12)[0]
        reference = 0.5 * (1.0 + cross + 2.0 * outer)
        assert reference == pytest.approx(2.0 * math.log(2.0), rel=1e-8)

        value = modular_value(sample_fractional(hat16, 0.5), quadratic, 1.0)
        assert value == pytest.approx(reference, rel=1e-3)

    def test_grading_self_convergence(self, hat16, quadratic):
        coarse = modular_value(sample_fractional(hat16, 0.5, QuadratureSpec(diagonal_grading=8)),
                               quadratic, 1.0)
        fine = modular_value(sample_fractional(hat16, 0.5, QuadratureSpec(diagonal_grading=16)),
                             quadratic, 1.0)
        assert abs(fine - coarse) <= 1e-6 * fine

    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_mesh_refinement_converges(self, s, quadratic):
        values = []
        for n in (16, 32, 64):
            u = interpolate(lambda x: x * (1.0 - x), make_mesh(0.0, 1.0, n))
            values.append(modular_value(sample_fractional(u, s), quadratic, 1.0))
        d1, d2 = abs(values[1] - values[0]), abs(values[2] - values[1])
        assert d2 <= 0.5 * d1

    def test_symmetric_in_sign(self, mesh16, random_field, cubic):
        u = random_field(mesh16)
        plus = modular_value(sample_fractional(u, 0.6), cubic, 1.0)
        minus = modular_value(sample_fractional(u.with_coefficients(-u.coefficients), 0.6),
                              cubic, 1.0)
        assert plus == pytest.approx(minus, rel=1e-14)

    def test_threaded_assembly_matches_serial(self, monkeypatch):
        mesh = make_mesh(0.0, 1.0, 12)
        spec = QuadratureSpec(gauss_order=3)
        serial = sample_cloud(mesh, 'fractional', 0.35, spec)
        sample_cloud.cache_clear()
        monkeypatch.setenv('ORLICZ_EIG_THREADS', '4')
        threaded = sample_cloud(mesh, 'fractional', 0.35, spec)
        sample_cloud.cache_clear()
        assert (serial.operator != threaded.operator).nnz == 0
        np.testing.assert_array_equal(serial.weights, threaded.weights)

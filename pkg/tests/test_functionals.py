"""Rayleigh quotient, pairings, derivatives and the Euler-Lagrange residual."""

import math

import numpy as np
import pytest
from scipy import sparse

from discretization import NodalField, make_mesh
from errors import AdmissionError, InvalidParameterError, ZeroFieldError
from functionals import (
    FunctionalContext, el_residual, frechet_dh, frechet_di, gram_matrix,
    h_value, i_value, j_value, pairing_h, pairing_i, picard_matrix,
)
from orlicz_norms import norm_G, seminorm_sG
from young_functions import bar_transform, parse_young_spec

ORDERS = [0.3, 0.5, 0.8, 1.0]


@pytest.fixture
def mesh():
    return make_mesh(0.0, 1.0, 16)


def _field(mesh, rng):
    return NodalField(mesh, rng.standard_normal(mesh.n_interior))


class TestContext:

    def test_admission_at_s_one(self, subquadratic, mesh):
        with pytest.raises(AdmissionError):
            FunctionalContext(subquadratic, 1.0, mesh)

    def test_fractional_admission(self, subquadratic, cubic, mesh):
        FunctionalContext(subquadratic, 0.5, mesh)
        FunctionalContext(cubic, 0.5, mesh)

    def test_order_outside_range(self, quadratic, mesh):
        with pytest.raises(InvalidParameterError):
            FunctionalContext(quadratic, 0.0, mesh)

    def test_numerator_override_needs_s_one(self, cubic, mesh):
        with pytest.raises(InvalidParameterError):
            FunctionalContext(cubic, 0.5, mesh, h_young=cubic)


class TestValues:

    def test_zero_field(self, quadratic, mesh):
        ctx = FunctionalContext(quadratic, 0.5, mesh)
        zero = NodalField(mesh, np.zeros(mesh.n_interior))
        assert i_value(ctx, zero) == 0.0
        assert h_value(ctx, zero) == 0.0
        with pytest.raises(ZeroFieldError):
            j_value(ctx, zero)
        with pytest.raises(ZeroFieldError):
            pairing_h(ctx, zero)

    def test_values_are_the_norms(self, power_sum, mesh, rng):
        ctx = FunctionalContext(power_sum, 0.5, mesh)
        u = _field(mesh, rng)
        assert i_value(ctx, u) == pytest.approx(norm_G(u, power_sum), rel=1e-14)
        assert h_value(ctx, u) == pytest.approx(seminorm_sG(u, power_sum, 0.5), rel=1e-14)

    @pytest.mark.parametrize("c", [1e-3, -0.5, 7.0, 1e3])
    def test_quotient_is_scale_invariant(self, power_sum, mesh, rng, c):
        ctx = FunctionalContext(power_sum, 0.7, mesh)
        u = _field(mesh, rng)
        scaled = u.with_coefficients(c * u.coefficients)
        assert j_value(ctx, scaled) == pytest.approx(j_value(ctx, u), rel=1e-10)

    def test_sine_at_s_one(self, quadratic, sine_field):
        u = sine_field(256)
        ctx = FunctionalContext(quadratic, 1.0, u.mesh)
        assert j_value(ctx, u) == pytest.approx(math.pi, rel=1e-3)

    def test_limit_numerator(self, cubic, mesh, rng):
        y_bar = bar_transform(cubic, points=64)
        ctx = FunctionalContext(cubic, 1.0, mesh, h_young=y_bar)
        plain = FunctionalContext(cubic, 1.0, mesh)
        u = _field(mesh, rng)
        # G_bar = (2/3) G, so the Luxemburg norm scales by (2/3)^{1/3}
        assert j_value(ctx, u) == pytest.approx((2.0 / 3.0) ** (1.0 / 3.0) * j_value(plain, u),
                                                rel=1e-7)


class TestPairings:

    @pytest.mark.parametrize("s", ORDERS)
    def test_power_denominators_equal_p(self, cubic, mesh, rng, s):
        ctx = FunctionalContext(cubic, s, mesh)
        u = _field(mesh, rng)
        assert pairing_i(ctx, u).denom == pytest.approx(3.0, rel=1e-9)
        assert pairing_h(ctx, u).denom == pytest.approx(3.0, rel=1e-9)

    @pytest.mark.parametrize("s", ORDERS)
    def test_denominators_within_exponents(self, power_sum, mesh, rng, s):
        ctx = FunctionalContext(power_sum, s, mesh)
        for _ in range(5):
            u = _field(mesh, rng)
            for result in (pairing_i(ctx, u), pairing_h(ctx, u)):
                assert 2.0 - 1e-9 <= result.denom <= 4.0 + 1e-9

    @pytest.mark.parametrize("s", ORDERS)
    def test_euler_identity(self, power_log, mesh, rng, s):
        ctx = FunctionalContext(power_log, s, mesh)
        u = _field(mesh, rng)
        for result in (pairing_i(ctx, u), pairing_h(ctx, u)):
            assert float(result.vector @ u.coefficients) == pytest.approx(
                result.tau * result.denom, rel=1e-8)

    @pytest.mark.parametrize("spec,s", [('powersum:2,1,4,1', 0.5), ('powersum:2,1,4,1', 1.0),
                                        ('power:1.5', 0.5), ('powerlog:2', 0.8)])
    def test_central_differences(self, spec, s, mesh, rng):
        Y = parse_young_spec(spec)
        ctx = FunctionalContext(Y, s, mesh)
        u = _field(mesh, rng)
        v = rng.standard_normal(mesh.n_interior)
        eps = 1e-6
        plus = u.with_coefficients(u.coefficients + eps * v)
        minus = u.with_coefficients(u.coefficients - eps * v)
        fd_i = (i_value(ctx, plus) - i_value(ctx, minus)) / (2 * eps)
        fd_h = (h_value(ctx, plus) - h_value(ctx, minus)) / (2 * eps)
        scale = float(np.max(np.abs(v)))
        assert abs(float(frechet_di(ctx, u) @ v) - fd_i) <= 1e-5 * scale
        assert abs(float(frechet_dh(ctx, u) @ v) - fd_h) <= 1e-5 * scale

    def test_quadratic_gradient_pairing_is_stiffness(self, quadratic, rng):
        mesh = make_mesh(0.0, 1.0, 20)
        ctx = FunctionalContext(quadratic, 1.0, mesh)
        u = _field(mesh, rng)
        n, h = mesh.n_interior, mesh.h
        stiffness = sparse.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)],
                                 [-1, 0, 1]) / h
        result = pairing_h(ctx, u)
        np.testing.assert_allclose(result.vector, stiffness @ u.coefficients / result.tau,
                                   rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("spec", ['power:3', 'power:1.5'])
    def test_monotonicity_of_normalized_derivative(self, spec, mesh, rng):
        ctx = FunctionalContext(parse_young_spec(spec), 0.5, mesh)
        for _ in range(10):
            u, w = _field(mesh, rng), _field(mesh, rng)
            pairing = float((frechet_dh(ctx, u) - frechet_dh(ctx, w))
                            @ (u.coefficients / h_value(ctx, u) - w.coefficients / h_value(ctx, w)))
            assert pairing >= -1e-10


class TestResidual:

    @pytest.mark.parametrize("s", [0.5, 1.0])
    def test_power_multiplier_equals_lambda(self, cubic, mesh, rng, s):
        ctx = FunctionalContext(cubic, s, mesh)
        result = el_residual(ctx, _field(mesh, rng), 5.0)
        assert result.mu == pytest.approx(5.0, rel=1e-9)

    def test_scale_invariant(self, power_sum, mesh, rng):
        ctx = FunctionalContext(power_sum, 0.6, mesh)
        u = _field(mesh, rng)
        base = el_residual(ctx, u, 3.0).norm
        scaled = el_residual(ctx, u.with_coefficients(40.0 * u.coefficients), 3.0).norm
        assert scaled == pytest.approx(base, rel=1e-8)

    def test_lambda_must_be_positive(self, quadratic, mesh, rng):
        ctx = FunctionalContext(quadratic, 0.5, mesh)
        with pytest.raises(InvalidParameterError):
            el_residual(ctx, _field(mesh, rng), 0.0)


class TestMatrices:

    def test_picard_reproduces_pairing(self, power_sum, mesh, rng):
        ctx = FunctionalContext(power_sum, 0.5, mesh)
        u = _field(mesh, rng)
        K = picard_matrix(ctx, u)
        np.testing.assert_allclose(K @ u.coefficients, pairing_h(ctx, u).vector,
                                   rtol=1e-6, atol=1e-10)

    def test_gram_is_symmetric_positive(self, quadratic, mesh):
        A = gram_matrix(FunctionalContext(quadratic, 0.5, mesh)).toarray()
        np.testing.assert_allclose(A, A.T, atol=1e-12)
        assert np.linalg.eigvalsh(A).min() > 0

"""Shared fixtures for the orlicz_eig test suite."""

import math

import numpy as np
import pytest

from discretization import NodalField, interpolate, make_mesh
from young_functions import make_young


@pytest.fixture
def quadratic():
    """G(t) = t^2 / 2."""
    return make_young('power', (2.0,))


@pytest.fixture
def cubic():
    return make_young('power', (3.0,))


@pytest.fixture
def subquadratic():
    return make_young('power', (1.5,))


@pytest.fixture
def power_sum():
    """G(t) = t^2 + t^4."""
    return make_young('power-sum', (2.0, 1.0, 4.0, 1.0))


@pytest.fixture
def power_log():
    return make_young('power-log', (2.0,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def mesh16():
    return make_mesh(0.0, 1.0, 16)


@pytest.fixture
def hat16(mesh16):
    """Basis function of the midpoint node."""
    coefficients = np.zeros(mesh16.n_interior)
    coefficients[mesh16.n_elements // 2 - 1] = 1.0
    return NodalField(mesh16, coefficients)


@pytest.fixture
def sine_field():
    def build(n, a=0.0, b=1.0):
        mesh = make_mesh(a, b, n)
        return interpolate(lambda x: math.sin(math.pi * (x - a) / (b - a)), mesh)
    return build


@pytest.fixture
def random_field(rng):
    def build(mesh):
        return NodalField(mesh, rng.standard_normal(mesh.n_interior))
    return build

#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Luxemburg norms and seminorms of sampled modulars.

    ||u|| = inf { tau > 0 : sum_i w_i G(m_i / tau) <= 1 }

The map tau -> sum w G(m / tau) is strictly decreasing whenever some m_i > 0,
so the norm is its unique unit crossing. Roots are bracketed by doubling or
halving from tau = 1 and refined by Newton steps that stay inside the bracket.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from config import LUXEMBURG_MAX_ITERS, LUXEMBURG_TOL
from discretization import (
    ModularSamples, NodalField, QuadratureSpec, sample_gradient,
    sample_fractional, sample_local,
)
from errors import ConvergenceError, InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass
class LuxemburgResult:
    """Norm value with the final modular residual |modular - 1|."""
    tau: float
    residual: float
    iterations: int


def luxemburg(samples: ModularSamples, Y, tol: float = LUXEMBURG_TOL,
              max_iters: int = LUXEMBURG_MAX_ITERS) -> LuxemburgResult:
    """
    Solve sum_i w_i G(m_i / tau) = 1 for tau.

    Args:
        samples: Sample magnitudes and weights
        Y: Young function
        tol: Tolerance on |modular - 1|
        max_iters: Shared budget of bracketing and refinement steps

    Returns:
        LuxemburgResult (tau = 0 when every magnitude vanishes)

    Raises:
        ConvergenceError: when the budget runs out or monotonicity fails
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")

    active = samples.magnitudes > 0
    if not np.any(active):
        return LuxemburgResult(0.0, 0.0, 0)
    m = samples.magnitudes[active]
    w = samples.weights[active]

    def excess(tau: float) -> float:
        return float(np.dot(w, Y.G(m / tau))) - 1.0

    def slope(tau: float) -> float:
        return -float(np.dot(w * m, Y.g(m / tau))) / tau ** 2

    iterations = 0
    tau = 1.0
    value = excess(tau)
    if abs(value) <= tol:
        return _polish(tau, value, excess, slope, iterations)

    # Exponential bracketing: lo has excess > 0, hi has excess < 0
    factor = 2.0 if value > 0 else 0.5
    previous = value
    while True:
        iterations += 1
        if iterations > max_iters:
            raise ConvergenceError(
                "Luxemburg bracketing exhausted its budget",
                {'tau': tau, 'excess': previous, 'iterations': iterations})
        candidate = tau * factor
        current = excess(candidate)
        if abs(current) <= tol:
            return _polish(candidate, current, excess, slope, iterations)
        if (factor > 1 and current > previous) or (factor < 1 and current < previous):
            raise ConvergenceError(
                "Modular is not decreasing in tau",
                {'tau': candidate, 'excess': current, 'previous_excess': previous})
        if (current > 0) != (previous > 0):
            lo, hi = (tau, candidate) if factor > 1 else (candidate, tau)
            break
        tau, previous = candidate, current

    # Safeguarded Newton inside [lo, hi]
    tau = 0.5 * (lo + hi)
    while iterations < max_iters:
        iterations += 1
        value = excess(tau)
        if abs(value) <= tol:
            return _polish(tau, value, excess, slope, iterations)
        if value > 0:
            lo = tau
        else:
            hi = tau
        derivative = slope(tau)
        step = tau - value / derivative if derivative < 0 else math.nan
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == tau or hi - lo <= 4 * np.finfo(float).eps * hi:
            # Bracket collapsed to floating-point resolution
            residual = abs(excess(step))
            if residual <= tol:
                return LuxemburgResult(step, residual, iterations)
            break
        tau = step

    raise ConvergenceError(
        "Luxemburg refinement exhausted its budget",
        {'tau': tau, 'bracket': [lo, hi], 'iterations': iterations})


def _polish(tau: float, value: float, excess, slope, iterations: int) -> LuxemburgResult:
    """One extra Newton step, kept only if it lowers the residual."""
    derivative = slope(tau)
    if derivative < 0 and value != 0.0:
        candidate = tau - value / derivative
        if candidate > 0:
            refined = excess(candidate)
            if abs(refined) < abs(value):
                return LuxemburgResult(candidate, abs(refined), iterations + 1)
    return LuxemburgResult(tau, abs(value), iterations)


def norm_G(u: NodalField, Y, spec: QuadratureSpec = QuadratureSpec(),
           tol: float = LUXEMBURG_TOL) -> float:
    """Luxemburg norm ||u||_G of the local modular."""
    return luxemburg(sample_local(u, spec), Y, tol).tau


def seminorm_sG(u: NodalField, Y, s: float, spec: QuadratureSpec = QuadratureSpec(),
                tol: float = LUXEMBURG_TOL) -> float:
    """
    Gagliardo seminorm [u]_{s,G} for s in (0, 1); ||u'||_G for s = 1.

    Raises:
        InvalidParameterError: if s is outside (0, 1]
    """
    if not (0.0 < s <= 1.0):
        raise InvalidParameterError(f"s must lie in (0, 1], got {s}")
    samples = sample_gradient(u, spec) if s == 1.0 else sample_fractional(u, s, spec)
    return luxemburg(samples, Y, tol).tau

#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The homogeneous Rayleigh quotient J_s = H_s / I and its derivatives.

    I(u)   = ||u||_G
    H_s(u) = [u]_{s,G}  for 0 < s < 1,   ||u'||_G  for s = 1

Both are 1-homogeneous Luxemburg values, and differentiating the unit-modular
identity gives

    <dH(u), v> = P_H(u, v) / D_H(u),
    P_H(u, v)  = sum_i w_i g(|d_i| / tau) sign(d_i) (S v)_i,
    D_H(u)     = sum_i w_i g(|d_i| / tau) |d_i| / tau,

with d = S u over the sample cloud of the modular and tau = H_s(u). The
same formulas with the local cloud give dI. Euler's identity <dH(u), u> = H(u)
holds by construction.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from config import LUXEMBURG_TOL
from discretization import Mesh1D, NodalField, QuadratureSpec, SampleCloud, sample_cloud
from errors import AdmissionError, InvalidParameterError, ZeroFieldError
from orlicz_norms import luxemburg

logger = logging.getLogger(__name__)

# Relative floor on magnitudes in the Picard weights g(m/tau)/m
PICARD_FLOOR = 1e-8


@dataclass(frozen=True)
class FunctionalContext:
    """
    Everything needed to evaluate I, H_s and J_s on fields of one mesh.

    h_young replaces Y in the numerator only; with s = 1 and the limit
    transform of Y it gives the limit quotient ||u'||_{G_bar} / ||u||_G.
    """
    Y: object
    s: float
    mesh: Mesh1D
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol: float = LUXEMBURG_TOL
    h_young: Optional[object] = None

    def __post_init__(self):
        if not (0.0 < self.s <= 1.0):
            raise InvalidParameterError(f"s must lie in (0, 1], got {self.s}")
        if self.h_young is not None and self.s != 1.0:
            raise InvalidParameterError("A numerator override is only used at s = 1")
        flags = self.Y.flags
        if self.h_young is not None:
            admitted = flags.admits(0.5)
        elif self.s == 1.0:
            admitted = flags.sqrt_convex
        else:
            admitted = flags.admits(self.s)
        if not admitted:
            raise AdmissionError(
                f"{self.Y.spec_string} is not admitted at s={self.s:g} "
                f"(sqrt_convex={flags.sqrt_convex}, gprime_decreasing={flags.gprime_decreasing})")

    @property
    def numerator_young(self):
        return self.h_young if self.h_young is not None else self.Y

    @property
    def i_cloud(self) -> SampleCloud:
        return sample_cloud(self.mesh, 'local', None, self.spec)

    @property
    def h_cloud(self) -> SampleCloud:
        if self.s == 1.0:
            return sample_cloud(self.mesh, 'gradient', None, self.spec)
        return sample_cloud(self.mesh, 'fractional', float(self.s), self.spec)

    def field(self, coefficients: np.ndarray) -> NodalField:
        return NodalField(self.mesh, coefficients)


@dataclass
class PairingResult:
    """Pairing vector P(u, phi_i), denominator D(u) and the norm value tau."""
    vector: np.ndarray
    denom: float
    tau: float


def _require_nonzero(u: NodalField) -> None:
    if u.is_zero():
        raise ZeroFieldError("Operation requires a nonzero field")


def _pairing(cloud: SampleCloud, Y, u: NodalField, tol: float) -> PairingResult:
    d = cloud.apply(u.coefficients)
    magnitudes = np.abs(d)
    tau = luxemburg(cloud.samples(u), Y, tol).tau
    if tau == 0.0:
        raise ZeroFieldError("Modular vanishes on a nonzero field")
    # g(0) = 0, so samples with d = 0 contribute nothing through sign(0) = 0
    flux = cloud.weights * Y.g(magnitudes / tau)
    vector = cloud.operator.T @ (flux * np.sign(d))
    denom = float(np.dot(flux, magnitudes)) / tau
    return PairingResult(vector=np.asarray(vector), denom=denom, tau=tau)


# ──────────────────────────────────────────────────────────────────────────────
# Values
# ──────────────────────────────────────────────────────────────────────────────

def i_value(ctx: FunctionalContext, u: NodalField) -> float:
    """I(u) = ||u||_G."""
    return luxemburg(ctx.i_cloud.samples(u), ctx.Y, ctx.tol).tau


def h_value(ctx: FunctionalContext, u: NodalField) -> float:
    """H_s(u) = [u]_{s,G}, or ||u'|| in the numerator Young function at s = 1."""
    return luxemburg(ctx.h_cloud.samples(u), ctx.numerator_young, ctx.tol).tau


def j_value(ctx: FunctionalContext, u: NodalField) -> float:
    """
    Rayleigh quotient H_s(u) / I(u).

    Raises:
        ZeroFieldError: for the zero field
    """
    _require_nonzero(u)
    return h_value(ctx, u) / i_value(ctx, u)


# ──────────────────────────────────────────────────────────────────────────────
# Pairings and derivatives
# ──────────────────────────────────────────────────────────────────────────────

def pairing_i(ctx: FunctionalContext, u: NodalField) -> PairingResult:
    """P_I(u, phi_i) and D_I(u) over the local Gauss samples."""
    _require_nonzero(u)
    return _pairing(ctx.i_cloud, ctx.Y, u, ctx.tol)


def pairing_h(ctx: FunctionalContext, u: NodalField) -> PairingResult:
    """P_H(u, phi_i) and D_H(u) over the fractional (or gradient) samples."""
    _require_nonzero(u)
    return _pairing(ctx.h_cloud, ctx.numerator_young, u, ctx.tol)


def frechet_di(ctx: FunctionalContext, u: NodalField) -> np.ndarray:
    """Gradient of I at u in the hat basis: P_I / D_I."""
    result = pairing_i(ctx, u)
    return result.vector / result.denom


def frechet_dh(ctx: FunctionalContext, u: NodalField) -> np.ndarray:
    """Gradient of H_s at u in the hat basis: P_H / D_H."""
    result = pairing_h(ctx, u)
    return result.vector / result.denom


@dataclass
class ResidualResult:
    """Euler-Lagrange residual of a candidate eigenpair."""
    vector: np.ndarray
    norm: float
    mu: float


def el_residual(ctx: FunctionalContext, u: NodalField, lam: float,
                pairings: Optional[Tuple[PairingResult, PairingResult]] = None) -> ResidualResult:
    """
    Residual r = P_H(u, .) - mu P_I(u, .) with multiplier mu = lam D_H / D_I.

    The norm is max|r| / (max|P_H| + floor), invariant under u -> c u.

    Args:
        ctx: Functional context
        u: Nonzero field
        lam: Candidate eigenvalue (> 0)
        pairings: Precomputed (P_I, P_H) at u
    """
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    _require_nonzero(u)
    p_i, p_h = pairings if pairings is not None else (pairing_i(ctx, u), pairing_h(ctx, u))
    mu = lam * p_h.denom / p_i.denom
    vector = p_h.vector - mu * p_i.vector
    floor = np.finfo(float).tiny
    norm = float(np.max(np.abs(vector)) / (np.max(np.abs(p_h.vector)) + floor))

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(json.dumps({
            'event': 'el_residual', 's': ctx.s, 'young': ctx.Y.spec_string,
            'J': p_h.tau / p_i.tau, 'lambda': lam, 'D_I': p_i.denom, 'D_H': p_h.denom,
            'mu': mu, 'residual': norm,
        }, sort_keys=True))
    return ResidualResult(vector=vector, norm=norm, mu=mu)


def picard_matrix(ctx: FunctionalContext, u: NodalField) -> sparse.csr_matrix:
    """
    Frozen-coefficient matrix K with K u = P_H(u, .).

    K = S^T diag(w g(m/tau) / m) S with m floored at PICARD_FLOOR * max m.
    """
    _require_nonzero(u)
    cloud = ctx.h_cloud
    Y = ctx.numerator_young
    magnitudes = np.abs(cloud.apply(u.coefficients))
    tau = luxemburg(cloud.samples(u), Y, ctx.tol).tau
    floored = np.maximum(magnitudes, PICARD_FLOOR * magnitudes.max())
    diag = cloud.weights * Y.g(floored / tau) / floored
    return (cloud.operator.T @ sparse.diags(diag) @ cloud.operator).tocsr()


def gram_matrix(ctx: FunctionalContext) -> sparse.csr_matrix:
    """Fixed preconditioner S^T diag(w) S of the numerator cloud."""
    cloud = ctx.h_cloud
    return (cloud.operator.T @ sparse.diags(cloud.weights) @ cloud.operator).tocsr()

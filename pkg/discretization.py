#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Interval meshes, piecewise-linear nodal fields and modular quadrature.

Every modular (local, gradient, fractional) is reduced to a sample cloud: a
sparse linear map S from interior coefficients to signed sample values plus
positive weights w, so that

    modular(u / tau) = sum_i w_i G(|(S c)_i| / tau).

Clouds depend only on (mesh, kind, s, quadrature spec) and are cached, so the
same operator serves every field, every tau and every Young function.

Fractional clouds combine four contributions, with (1 - s) folded into w:
1. Far element pairs (offset >= 2): tensor Gauss rules
2. Adjacent pairs: L-shaped geometric layers toward the shared node
3. Identical elements: exact reduction to a 1-D integral in log r
4. Exterior strips: the tail in y reduced to a log-variable rule

Usage:
    mesh = make_mesh(0.0, 1.0, 64)
    u = interpolate(lambda x: np.sin(np.pi * x), mesh)
    samples = sample_fractional(u, 0.5, QuadratureSpec())
    value = modular_value(samples, Y, 1.0)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import sparse

from config import (
    DIAGONAL_GRADING, EXTERIOR_TOL, GAUSS_ORDER, LOG_PANEL_ORDER,
    LOG_PANEL_WIDTH, assembly_workers,
)
from errors import InvalidIntervalError, InvalidParameterError, NonFiniteValueError

logger = logging.getLogger(__name__)

KINDS = ('local', 'gradient', 'fractional')

# Ratio of the geometric layers around the shared node of adjacent elements
GRADING_RATIO = 0.5


# ──────────────────────────────────────────────────────────────────────────────
# Data Classes
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of [a, b] with n_elements elements."""
    a: float
    b: float
    n_elements: int

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_elements

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_elements + 1)

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def n_interior(self) -> int:
        return self.n_elements - 1


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature parameters shared by all sample clouds."""
    gauss_order: int = GAUSS_ORDER
    diagonal_grading: int = DIAGONAL_GRADING
    exterior_tol: float = EXTERIOR_TOL

    def __post_init__(self):
        if self.gauss_order < 2:
            raise InvalidParameterError(f"gauss_order must be >= 2, got {self.gauss_order}")
        if self.diagonal_grading < 2:
            raise InvalidParameterError(
                f"diagonal_grading must be >= 2, got {self.diagonal_grading}")
        if not (0.0 < self.exterior_tol < 1.0):
            raise InvalidParameterError(
                f"exterior_tol must lie in (0, 1), got {self.exterior_tol}")


@dataclass
class NodalField:
    """
    Continuous piecewise-linear function on the mesh, zero outside (a, b).

    coefficients holds the values at the n_elements - 1 interior nodes.
    """
    mesh: Mesh1D
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (self.mesh.n_interior,):
            raise InvalidParameterError(
                f"Expected {self.mesh.n_interior} coefficients, got {self.coefficients.shape}")
        if not np.all(np.isfinite(self.coefficients)):
            raise NonFiniteValueError("Nodal coefficients must be finite")

    def nodal_values(self) -> np.ndarray:
        """Values at all mesh nodes, boundary zeros included."""
        return np.concatenate(([0.0], self.coefficients, [0.0]))

    def __call__(self, x):
        """Evaluate the field (zero extension outside the interval)."""
        return np.interp(x, self.mesh.nodes, self.nodal_values(), left=0.0, right=0.0)

    def with_coefficients(self, coefficients: np.ndarray) -> 'NodalField':
        return NodalField(self.mesh, coefficients)

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)


@dataclass(frozen=True)
class SampleCloud:
    """Sparse sampling operator and positive weights of one modular."""
    operator: sparse.csr_matrix
    weights: np.ndarray
    kind: str
    s: Optional[float] = None

    @property
    def size(self) -> int:
        return self.weights.size

    def apply(self, coefficients: np.ndarray) -> np.ndarray:
        """Signed sample values S c."""
        return self.operator @ coefficients

    def samples(self, field: NodalField) -> 'ModularSamples':
        return ModularSamples(np.abs(self.apply(field.coefficients)), self.weights,
                              self.kind, self.s)


@dataclass(frozen=True)
class ModularSamples:
    """Magnitudes m_i >= 0 and weights w_i > 0 of a sampled modular."""
    magnitudes: np.ndarray
    weights: np.ndarray
    kind: str
    s: Optional[float] = None

    @property
    def entries(self) -> List[Tuple[float, float]]:
        return list(zip(self.magnitudes.tolist(), self.weights.tolist()))

    def scaled(self, factor: float) -> 'ModularSamples':
        return ModularSamples(abs(factor) * self.magnitudes, self.weights, self.kind, self.s)


# ──────────────────────────────────────────────────────────────────────────────
# Meshes and fields
# ──────────────────────────────────────────────────────────────────────────────

def make_mesh(a: float, b: float, n_elements: int) -> Mesh1D:
    """
    Build a uniform mesh of [a, b].

    Raises:
        InvalidIntervalError: if a >= b or n_elements < 2
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise InvalidIntervalError(f"Interval endpoints must satisfy a < b, got ({a}, {b})")
    if int(n_elements) != n_elements or n_elements < 2:
        raise InvalidIntervalError(
            f"Need at least 2 elements for an interior node, got {n_elements}")
    return Mesh1D(float(a), float(b), int(n_elements))


def interpolate(f: Callable[[float], float], mesh: Mesh1D) -> NodalField:
    """
    Nodal interpolant of f; boundary values are forced to zero.

    Raises:
        NonFiniteValueError: if f is not finite at some interior node
    """
    values = np.array([f(x) for x in mesh.interior_nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = mesh.interior_nodes[~np.isfinite(values)][0]
        raise NonFiniteValueError(f"Function is not finite at interior node x={bad:g}")
    return NodalField(mesh, values)


def field_rows(field: NodalField) -> List[dict]:
    """Rows (x, u) at all nodes for CSV export."""
    return [{'x': float(x), 'u': float(v)}
            for x, v in zip(field.mesh.nodes, field.nodal_values())]


# ──────────────────────────────────────────────────────────────────────────────
# Quadrature rules
# ──────────────────────────────────────────────────────────────────────────────

@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def log_panel_rule(depth: float, finest: float, order: int = LOG_PANEL_ORDER,
                   widest: float = LOG_PANEL_WIDTH) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss rule on [-depth, 0].

    Panel widths start at `finest` next to 0 and double until `widest`.
    """
    edges = [0.0]
    width = min(finest, widest)
    while edges[-1] > -depth:
        edges.append(max(edges[-1] - width, -depth))
        width = min(2.0 * width, widest)
    xg, wg = gauss_legendre(order)
    offsets, weights = [], []
    for top, bottom in zip(edges[:-1], edges[1:]):
        span = top - bottom
        offsets.append(bottom + span * xg)
        weights.append(span * wg)
    return np.concatenate(offsets), np.concatenate(weights)


def exterior_rule(delta: float, s: float,
                  spec: QuadratureSpec = QuadratureSpec()) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rule (w_k, c_k) with sum_k c_k G(m w_k) ~ int_delta^inf G(m d^-s) dd/d.

    With w = d^-s the tail becomes (1/s) int_0^{delta^-s} G(m w) dw/w, and with
    omega = log w a rule on (-inf, -s log delta] truncated where G has decayed
    below exterior_tol (G(t) <= G(1) t for t <= 1).
    """
    if not (0.0 < s < 1.0):
        raise InvalidParameterError(f"s must lie in (0, 1), got {s}")
    if delta <= 0:
        raise InvalidParameterError("delta must be positive")
    offsets, weights = log_panel_rule(math.log(1.0 / spec.exterior_tol), LOG_PANEL_WIDTH)
    top = -s * math.log(delta)
    return np.exp(top + offsets), weights / s


def _identical_rule(h: float, s: float, spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rule (e^nu_k, c_k) for the element self-interaction.

    (1 - s) int_e int_e G(|k| |x-y|^{1-s}) / |x-y| dx dy
        = int_{-inf}^{nu_h} G(|k| e^nu) 2 (h - e^{nu/(1-s)}) dnu,   nu_h = (1-s) log h,

    for a field with slope k on the element. The factor h - r varies on the
    scale (1 - s) below nu_h, which sets the finest panel.
    """
    offsets, weights = log_panel_rule(math.log(1.0 / spec.exterior_tol), (1.0 - s) / 4.0)
    r = h * np.exp(offsets / (1.0 - s))
    return h ** (1.0 - s) * np.exp(offsets), 2.0 * (h - r) * weights


def _adjacent_rule(h: float, spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Points (a, b) and weights on [0, h]^2 graded toward the corner (0, 0).

    Layer l is the L-shaped set [0, h q^l]^2 minus [0, h q^{l+1}]^2, split into
    three squares; the innermost square closes the rule.
    """
    xg, wg = gauss_legendre(spec.gauss_order)
    squares = []
    for level in range(spec.diagonal_grading):
        outer = h * GRADING_RATIO ** level
        inner = h * GRADING_RATIO ** (level + 1)
        squares += [(inner, 0.0, outer - inner, inner),
                    (0.0, inner, inner, outer - inner),
                    (inner, inner, outer - inner, outer - inner)]
    last = h * GRADING_RATIO ** spec.diagonal_grading
    squares.append((0.0, 0.0, last, last))

    a_pts, b_pts, wts = [], [], []
    for a0, b0, da, db in squares:
        aa, bb = np.meshgrid(a0 + da * xg, b0 + db * xg, indexing='ij')
        ww = np.outer(da * wg, db * wg)
        a_pts.append(aa.ravel())
        b_pts.append(bb.ravel())
        wts.append(ww.ravel())
    return np.concatenate(a_pts), np.concatenate(b_pts), np.concatenate(wts)


# ──────────────────────────────────────────────────────────────────────────────
# Cloud assembly
# ──────────────────────────────────────────────────────────────────────────────

# A block is a callable filling rows [start, start + size) of the triplet arrays.
# Each row references at most 4 nodes; unused slots carry coefficient 0.

@dataclass
class _Block:
    size: int
    fill: Callable[[np.ndarray, np.ndarray, np.ndarray], None]


def _far_block(mesh: Mesh1D, s: float, spec: QuadratureSpec, k: int) -> _Block:
    """Element pairs (e, e + k), k >= 2, both orders (factor 2)."""
    h, n = mesh.h, mesh.n_elements
    xg, wg = gauss_legendre(spec.gauss_order)
    xa, xb = np.meshgrid(xg, xg, indexing='ij')
    wa, wb = np.meshgrid(wg, wg, indexing='ij')
    xa, xb, wab = xa.ravel(), xb.ravel(), (wa * wb).ravel()
    r = h * (k + xb - xa)
    pattern = np.stack([1.0 - xa, xa, -(1.0 - xb), -xb], axis=1) / r[:, None] ** s
    pattern_w = 2.0 * (1.0 - s) * h * h * wab / r
    offsets = np.array([0, 1, k, k + 1])
    pairs = n - k

    def fill(nodes, coeffs, weights):
        e = np.arange(pairs)
        nodes[:] = (e[:, None, None] + offsets[None, None, :]).repeat(
            pattern.shape[0], axis=1).reshape(-1, 4)
        coeffs[:] = np.tile(pattern, (pairs, 1))
        weights[:] = np.tile(pattern_w, pairs)

    return _Block(pairs * pattern.shape[0], fill)


def _adjacent_block(mesh: Mesh1D, s: float, spec: QuadratureSpec) -> _Block:
    """
    Element pairs (e, e + 1) in local coordinates x = x_{e+1} - a, y = x_{e+1} + b.

    u(x) - u(y) = U_e a/h + U_{e+1} (b - a)/h - U_{e+2} b/h.
    """
    h, n = mesh.h, mesh.n_elements
    a, b, w = _adjacent_rule(h, spec)
    r = a + b
    pattern = np.stack([a / h, (b - a) / h, -b / h, np.zeros_like(a)], axis=1) / r[:, None] ** s
    pattern_w = 2.0 * (1.0 - s) * w / r
    offsets = np.array([0, 1, 2, 0])
    pairs = n - 1

    def fill(nodes, coeffs, weights):
        e = np.arange(pairs)
        nodes[:] = (e[:, None, None] + offsets[None, None, :]).repeat(
            pattern.shape[0], axis=1).reshape(-1, 4)
        coeffs[:] = np.tile(pattern, (pairs, 1))
        weights[:] = np.tile(pattern_w, pairs)

    return _Block(pairs * pattern.shape[0], fill)


def _identical_block(mesh: Mesh1D, s: float, spec: QuadratureSpec) -> _Block:
    h, n = mesh.h, mesh.n_elements
    scale, w = _identical_rule(h, s, spec)
    zeros = np.zeros_like(scale)
    pattern = np.stack([-scale / h, scale / h, zeros, zeros], axis=1)
    offsets = np.array([0, 1, 0, 0])

    def fill(nodes, coeffs, weights):
        e = np.arange(n)
        nodes[:] = (e[:, None, None] + offsets[None, None, :]).repeat(
            pattern.shape[0], axis=1).reshape(-1, 4)
        coeffs[:] = np.tile(pattern, (n, 1))
        weights[:] = np.tile(w, n)

    return _Block(n * pattern.shape[0], fill)


def _exterior_block(mesh: Mesh1D, s: float, spec: QuadratureSpec) -> _Block:
    """x in the domain, y outside on either side; both orders (factor 2)."""
    h, n = mesh.h, mesh.n_elements
    xg, wg = gauss_legendre(spec.gauss_order)
    depth = math.log(1.0 / spec.exterior_tol)
    offsets_w, weights_w = log_panel_rule(depth, LOG_PANEL_WIDTH)
    per_point = 2 * offsets_w.size

    def fill(nodes, coeffs, weights):
        e = np.repeat(np.arange(n), xg.size)
        xi = np.tile(xg, n)
        wx = np.tile(wg, n)
        x = mesh.a + h * (e + xi)
        # scale[p, side, k] = delta^-s e^{offset_k}
        deltas = np.stack([x - mesh.a, mesh.b - x], axis=1)
        scale = deltas[:, :, None] ** (-s) * np.exp(offsets_w)[None, None, :]
        scale = scale.reshape(x.size, per_point)
        nodes[:, 0] = np.repeat(e, per_point)
        nodes[:, 1] = np.repeat(e + 1, per_point)
        nodes[:, 2:] = 0
        coeffs[:, 0] = ((1.0 - xi)[:, None] * scale).ravel()
        coeffs[:, 1] = (xi[:, None] * scale).ravel()
        coeffs[:, 2:] = 0.0
        base = 2.0 * (1.0 - s) * h * wx / s
        weights[:] = (base[:, None] * np.tile(weights_w, 2)[None, :]).ravel()

    return _Block(n * xg.size * per_point, fill)


def _local_block(mesh: Mesh1D, spec: QuadratureSpec) -> _Block:
    h, n = mesh.h, mesh.n_elements
    xg, wg = gauss_legendre(spec.gauss_order)

    def fill(nodes, coeffs, weights):
        e = np.repeat(np.arange(n), xg.size)
        xi = np.tile(xg, n)
        nodes[:] = 0
        nodes[:, 0], nodes[:, 1] = e, e + 1
        coeffs[:] = 0.0
        coeffs[:, 0], coeffs[:, 1] = 1.0 - xi, xi
        weights[:] = h * np.tile(wg, n)

    return _Block(n * xg.size, fill)


def _gradient_block(mesh: Mesh1D) -> _Block:
    h, n = mesh.h, mesh.n_elements

    def fill(nodes, coeffs, weights):
        e = np.arange(n)
        nodes[:] = 0
        nodes[:, 0], nodes[:, 1] = e, e + 1
        coeffs[:] = 0.0
        coeffs[:, 0], coeffs[:, 1] = -1.0 / h, 1.0 / h
        weights[:] = h

    return _Block(n, fill)


def _assemble(mesh: Mesh1D, blocks: List[_Block], kind: str, s: Optional[float]) -> SampleCloud:
    """Fill preallocated triplets block by block into disjoint slices, then build CSR."""
    total = sum(block.size for block in blocks)
    nodes = np.zeros((total, 4), dtype=np.int64)
    coeffs = np.zeros((total, 4), dtype=float)
    weights = np.zeros(total, dtype=float)

    starts = np.cumsum([0] + [block.size for block in blocks])

    def run(index: int) -> None:
        lo, hi = starts[index], starts[index + 1]
        blocks[index].fill(nodes[lo:hi], coeffs[lo:hi], weights[lo:hi])

    workers = assembly_workers()
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            list(executor.map(run, range(len(blocks))))
    else:
        for index in range(len(blocks)):
            run(index)

    n = mesh.n_elements
    keep = (nodes > 0) & (nodes < n) & (coeffs != 0.0)
    rows = np.repeat(np.arange(total), 4).reshape(total, 4)
    operator = sparse.csr_matrix(
        (coeffs[keep], (rows[keep], nodes[keep] - 1)), shape=(total, mesh.n_interior))

    if not (np.all(weights > 0) and np.all(np.isfinite(weights))):
        raise NonFiniteValueError(f"{kind} cloud produced non-positive or non-finite weights")
    logger.debug("Assembled %s cloud (n=%d, s=%s): %d samples, %d nonzeros, %d workers",
                 kind, n, s, total, operator.nnz, workers)
    return SampleCloud(operator, weights, kind, s)


@lru_cache(maxsize=8)
def sample_cloud(mesh: Mesh1D, kind: str, s: Optional[float] = None,
                 spec: QuadratureSpec = QuadratureSpec()) -> SampleCloud:
    """
    Cached sample cloud for a modular kind on a mesh.

    Args:
        mesh: Uniform mesh
        kind: 'local', 'gradient' or 'fractional'
        s: Fractional order in (0, 1), required for kind 'fractional'
        spec: Quadrature parameters
    """
    if kind == 'local':
        return _assemble(mesh, [_local_block(mesh, spec)], kind, None)
    if kind == 'gradient':
        return _assemble(mesh, [_gradient_block(mesh)], kind, None)
    if kind != 'fractional':
        raise InvalidParameterError(f"Unknown modular kind '{kind}'")
    if s is None or not (0.0 < s < 1.0):
        raise InvalidParameterError(f"Fractional order must lie in (0, 1), got {s}")

    blocks = [_identical_block(mesh, s, spec), _adjacent_block(mesh, s, spec),
              _exterior_block(mesh, s, spec)]
    blocks += [_far_block(mesh, s, spec, k) for k in range(2, mesh.n_elements)]
    return _assemble(mesh, blocks, kind, s)


# ──────────────────────────────────────────────────────────────────────────────
# Operations
# ──────────────────────────────────────────────────────────────────────────────

def sample_local(u: NodalField, spec: QuadratureSpec = QuadratureSpec()) -> ModularSamples:
    """Gauss samples (|u(x_q)|, h w_q) of the modular int G(|u|)."""
    return sample_cloud(u.mesh, 'local', None, spec).samples(u)


def sample_gradient(u: NodalField, spec: QuadratureSpec = QuadratureSpec()) -> ModularSamples:
    """One sample (|u'|, h) per element; exact for piecewise-linear fields."""
    return sample_cloud(u.mesh, 'gradient', None, spec).samples(u)


def sample_fractional(u: NodalField, s: float,
                      spec: QuadratureSpec = QuadratureSpec()) -> ModularSamples:
    """
    Samples of (1 - s) int int G(|u(x) - u(y)| / |x - y|^s) dx dy / |x - y|.

    Raises:
        InvalidParameterError: if s is outside (0, 1)
    """
    if not (0.0 < s < 1.0):
        raise InvalidParameterError(f"Fractional order must lie in (0, 1), got {s}")
    return sample_cloud(u.mesh, 'fractional', float(s), spec).samples(u)


def modular_value(samples: ModularSamples, Y, tau: float) -> float:
    """
    sum_i w_i G(m_i / tau).

    Raises:
        InvalidParameterError: if tau <= 0
    """
    if not tau > 0:
        raise InvalidParameterError(f"tau must be positive, got {tau}")
    return float(np.dot(samples.weights, Y.G(samples.magnitudes / tau)))

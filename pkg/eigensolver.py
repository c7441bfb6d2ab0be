#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Variational eigenvalues of the fractional g-Laplacian in homogeneous form.

- minimize_first:     inverse iteration or descent for J_s on ||u||_G = 1
- second_upper_bound: min over odd loops of the max of J_s (upper bound only)
- p2_matrix_oracle:   dense generalized eigensolve for G(t) = t^2/2
- stability_sweep:    lambda(s) for s -> 1 against the limit problem
- bbm_check:          [u]_{s,G} -> ||u'||_{G_bar} for a fixed field

With the default preconditioner each outer step is a nonlinear inverse
iteration: the numerator modular equation Phi_H'(v) = beta dI(u) is solved by
Newton's method, beta is tuned so that Phi_H(v) = 1, and v is renormalized.
Fixed points are exactly the Euler-Lagrange solutions. A step that raises J
falls back to Armijo descent along K^{-1} grad J with the frozen-coefficient
matrix K of the numerator (K u = P_H(u, .)).
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg, optimize, sparse
from scipy.integrate import solve_ivp

from config import (
    ARMIJO, BACKTRACK, BBM_SLACK, DEFAULT_SEED, INNER_NEWTON_ITERS, INNER_NEWTON_TOL,
    INVERSE_ACCEPT, LOOP_POINTS, LOOP_SWEEPS, LUXEMBURG_TOL, MAX_ITERS, MIN_STEP,
    RESIDUAL_TOL, STEP0,
)
from discretization import (
    Mesh1D, NodalField, QuadratureSpec, interpolate, modular_value,
    sample_fractional, sample_gradient,
)
from errors import (
    InvalidParameterError, OrliczEigError, SolverError, WrongFamilyError,
    ZeroFieldError,
)
from functionals import (
    PICARD_FLOOR, FunctionalContext, el_residual, gram_matrix, i_value, j_value,
    pairing_h, pairing_i, picard_matrix,
)
from orlicz_norms import seminorm_sG
from young_functions import YoungFunction, bar_transform

logger = logging.getLogger(__name__)

PRECONDITIONERS = ('picard', 'fixed', 'none')


# ──────────────────────────────────────────────────────────────────────────────
# Data Classes
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SolverConfig:
    """Descent and loop-search parameters."""
    max_iters: int = MAX_ITERS
    step0: float = STEP0
    backtrack: float = BACKTRACK
    armijo: float = ARMIJO
    residual_tol: float = RESIDUAL_TOL
    min_step: float = MIN_STEP
    seed: int = DEFAULT_SEED
    preconditioner: str = 'picard'
    loop_points: int = LOOP_POINTS
    loop_sweeps: int = LOOP_SWEEPS

    def __post_init__(self):
        positive = ('max_iters', 'step0', 'armijo', 'residual_tol', 'min_step',
                    'loop_points', 'loop_sweeps')
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if not (0.0 < self.backtrack < 1.0):
            raise InvalidParameterError(f"backtrack must lie in (0, 1), got {self.backtrack}")
        if self.preconditioner not in PRECONDITIONERS:
            raise InvalidParameterError(
                f"preconditioner must be one of {PRECONDITIONERS}, got '{self.preconditioner}'")


@dataclass
class EigenPair:
    """Eigenvalue candidate with its normalized field (||u||_G = 1)."""
    s: float
    lam: float
    mu: float
    field: NodalField
    residual_norm: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)
    upper_bound: bool = False
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            's': self.s,
            'lambda': self.lam,
            'mu': self.mu,
            'residual': self.residual_norm,
            'iterations': self.iterations,
            'converged': self.converged,
            'upper_bound': self.upper_bound,
            'n_elements': self.field.mesh.n_elements,
        }


@dataclass
class OracleResult:
    """Two smallest quotient values of the quadratic problem and their vectors."""
    lam1: float
    lam2: float
    vectors: np.ndarray
    asymmetry: float = 0.0


@dataclass
class SweepResult:
    """lambda(s) along the sweep, its extrapolation and the limit problem."""
    s_values: List[float]
    lambdas: List[float]
    pairs: List[EigenPair]
    failures: Dict[float, str]
    extrapolated_limit: Optional[float]
    alpha: Optional[float]
    local_limit: float
    gap: Optional[float]
    reference_limit: Optional[float] = None

    def rows(self) -> List[dict]:
        return [{'s': p.s, 'lambda': p.lam, 'mu': p.mu, 'residual': p.residual_norm,
                 'iterations': p.iterations} for p in self.pairs]

    def to_dict(self) -> dict:
        return {
            's_values': self.s_values,
            'lambdas': self.lambdas,
            'points': [p.to_dict() for p in self.pairs],
            'failures': {f"{s:g}": msg for s, msg in self.failures.items()},
            'extrapolated_limit': self.extrapolated_limit,
            'alpha': self.alpha,
            'local_limit': self.local_limit,
            'gap': self.gap,
            'reference_limit': self.reference_limit,
        }


@dataclass
class BBMRow:
    s: float
    seminorm: float
    modular: float


@dataclass
class BBMReport:
    """Seminorms and modulars along s with the local targets."""
    rows: List[BBMRow]
    target_norm: float
    target_modular: float
    gap: float
    liminf_ok: bool
    limit_estimate: float = 0.0

    def table(self) -> List[dict]:
        return [{'s': r.s, 'seminorm': r.seminorm, 'modular': r.modular,
                 'target_norm': self.target_norm, 'target_modular': self.target_modular}
                for r in self.rows]

    def to_dict(self) -> dict:
        return {'rows': [asdict(r) for r in self.rows], 'target_norm': self.target_norm,
                'target_modular': self.target_modular, 'gap': self.gap,
                'liminf_ok': self.liminf_ok, 'limit_estimate': self.limit_estimate}


# ──────────────────────────────────────────────────────────────────────────────
# Helpers
# ──────────────────────────────────────────────────────────────────────────────

def default_init(mesh: Mesh1D, kind: str = 'parabola', seed: int = DEFAULT_SEED) -> NodalField:
    """
    Initial field: (x - a)(b - x), or a seeded positive random field.
    """
    if kind == 'parabola':
        return interpolate(lambda x: (x - mesh.a) * (mesh.b - x), mesh)
    if kind == 'random':
        rng = np.random.default_rng(seed)
        return NodalField(mesh, rng.uniform(0.1, 1.0, mesh.n_interior))
    raise InvalidParameterError(f"Unknown init '{kind}'")


class _Preconditioner:
    """Solves K d = grad with the Picard matrix, the fixed Gram matrix or identity."""

    def __init__(self, ctx: FunctionalContext, kind: str):
        self.ctx = ctx
        self.kind = kind
        self._fixed = None

    def _fixed_factor(self):
        if self._fixed is None:
            self._fixed = linalg.cho_factor(gram_matrix(self.ctx).toarray())
        return self._fixed

    def solve(self, u: NodalField, grad: np.ndarray) -> np.ndarray:
        if self.kind == 'none':
            return grad
        if self.kind == 'picard':
            try:
                factor = linalg.cho_factor(picard_matrix(self.ctx, u).toarray())
                return linalg.cho_solve(factor, grad)
            except linalg.LinAlgError:
                logger.debug("Picard matrix not positive definite, using fixed Gram matrix")
        return linalg.cho_solve(self._fixed_factor(), grad)


def _gradient_j(p_i, p_h) -> np.ndarray:
    """grad J = (dH - J dI) / I in the hat basis."""
    lam = p_h.tau / p_i.tau
    return (p_h.vector / p_h.denom - lam * p_i.vector / p_i.denom) / p_i.tau


class _ModularSolver:
    """
    Newton solver for Phi_H'(v) = rhs with Phi_H(v) = sum_i w_i G(|(S v)_i|).

    Phi_H is strictly convex and superlinear, so Newton steps with Armijo
    backtracking on Phi_H(v) - <rhs, v> converge from any nonzero start.
    The Hessian S^T diag(w g'(m)) S uses magnitudes floored like the Picard
    weights.
    """

    def __init__(self, ctx: FunctionalContext):
        self.cloud = ctx.h_cloud
        self.Y = ctx.numerator_young

    def modular(self, v: np.ndarray) -> float:
        return float(np.dot(self.cloud.weights, self.Y.G(np.abs(self.cloud.apply(v)))))

    def growth(self, v: np.ndarray) -> float:
        """sum w g(m) m / sum w G(m), which is p for G = t^p/p."""
        m = np.abs(self.cloud.apply(v))
        return float(np.dot(self.cloud.weights, self.Y.g(m) * m)) / self.modular(v)

    def solve(self, rhs: np.ndarray, start: np.ndarray) -> np.ndarray:
        S, w = self.cloud.operator, self.cloud.weights
        v = start
        value = self.modular(v) - float(rhs @ v)
        scale = float(np.max(np.abs(rhs)))
        for _ in range(INNER_NEWTON_ITERS):
            d = S @ v
            m = np.abs(d)
            grad = S.T @ (w * self.Y.g(m) * np.sign(d)) - rhs
            if np.max(np.abs(grad)) <= INNER_NEWTON_TOL * scale:
                break
            floored = np.maximum(m, PICARD_FLOOR * m.max())
            hessian = (S.T @ sparse.diags(w * self.Y.dg(floored)) @ S).toarray()
            step = linalg.cho_solve(linalg.cho_factor(hessian), grad)
            slope = float(grad @ step)
            eta = 1.0
            while eta >= MIN_STEP:
                trial = v - eta * step
                trial_value = self.modular(trial) - float(rhs @ trial)
                if trial_value <= value - ARMIJO * eta * slope:
                    break
                eta *= BACKTRACK
            else:
                break
            v, value = trial, trial_value
        return v


def _inverse_step(solver: _ModularSolver, p_i, beta: float, start: np.ndarray):
    """
    One nonlinear inverse iteration: Phi_H'(v) = beta dI(u) with Phi_H(v) = 1.

    beta is rescaled by the local growth exponent q, which is exact for power
    functions (Phi_H(v(beta)) ~ beta^{q/(q-1)}).

    Returns:
        (v, beta) with v ready to be renormalized
    """
    direction = p_i.vector / p_i.denom
    v = start
    for _ in range(4):
        v = solver.solve(beta * direction, v)
        phi = solver.modular(v)
        if abs(phi - 1.0) <= 1e-8:
            break
        q = solver.growth(v)
        factor = phi ** (-(q - 1.0) / q)
        v = v * factor ** (1.0 / (q - 1.0))
        beta *= factor
    return v, beta


# ──────────────────────────────────────────────────────────────────────────────
# First eigenvalue
# ──────────────────────────────────────────────────────────────────────────────

def minimize_first(ctx: FunctionalContext, init: NodalField,
                   cfg: SolverConfig = SolverConfig()) -> EigenPair:
    """
    Minimize J_s over ||u||_G = 1.

    The 'picard' preconditioner takes nonlinear inverse iteration steps and
    falls back to Picard-preconditioned descent when a step raises J by more
    than INVERSE_ACCEPT; 'fixed' and 'none' use descent with Armijo
    backtracking throughout.

    Args:
        ctx: Functional context (admission already checked)
        init: Nonzero initial field
        cfg: Solver configuration

    Returns:
        EigenPair; converged is False when the budget runs out or the line
        search stagnates (the best iterate is still returned)

    Raises:
        ZeroFieldError: for a zero initial field
    """
    if init.is_zero():
        raise ZeroFieldError("Initial field must be nonzero")

    u = init.with_coefficients(init.coefficients / i_value(ctx, init))
    current = j_value(ctx, u)
    history = [current]
    preconditioner = _Preconditioner(ctx, cfg.preconditioner)
    solver = _ModularSolver(ctx) if cfg.preconditioner == 'picard' else None
    beta, start = None, None
    inverse_steps = 0
    converged = False
    status = 'max_iters'
    residual = None
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        p_i, p_h = pairing_i(ctx, u), pairing_h(ctx, u)
        residual = el_residual(ctx, u, current, (p_i, p_h))
        if residual.norm <= cfg.residual_tol:
            converged = True
            status = 'converged'
            break

        if solver is not None:
            if beta is None:
                beta, start = residual.mu * p_i.denom, u.coefficients / p_h.tau
            try:
                v, beta = _inverse_step(solver, p_i, beta, start)
                value = j_value(ctx, u.with_coefficients(v))
            except (linalg.LinAlgError, ZeroFieldError) as exc:
                logger.debug("Inverse iteration abandoned, descending instead: %s", exc)
                solver = None
            else:
                if value <= current * (1.0 + INVERSE_ACCEPT):
                    trial_field = u.with_coefficients(v)
                    u = trial_field.with_coefficients(v / i_value(ctx, trial_field))
                    start = v
                    current = value
                    history.append(current)
                    inverse_steps += 1
                    continue
                beta = None

        grad = _gradient_j(p_i, p_h)
        direction = preconditioner.solve(u, grad)
        slope = float(grad @ direction)
        if not slope > 0:
            direction, slope = grad, float(grad @ grad)

        eta = cfg.step0 * p_h.denom
        accepted = None
        fallback = None
        while eta >= cfg.min_step:
            trial = u.coefficients - eta * direction
            if np.any(trial):
                value = j_value(ctx, u.with_coefficients(trial))
                if value <= current - cfg.armijo * eta * slope:
                    accepted = (trial, value)
                    break
                if value <= current and (fallback is None or value < fallback[1]):
                    fallback = (trial, value)
            eta *= cfg.backtrack
        accepted = accepted or fallback
        if accepted is None:
            status = 'stagnated'
            break

        trial, value = accepted
        trial_field = u.with_coefficients(trial)
        u = trial_field.with_coefficients(trial / i_value(ctx, trial_field))
        current = value
        history.append(current)
    else:
        p_i, p_h = pairing_i(ctx, u), pairing_h(ctx, u)
        residual = el_residual(ctx, u, current, (p_i, p_h))
        converged = residual.norm <= cfg.residual_tol
        status = 'converged' if converged else status

    logger.info("s=%g %s: lambda=%.10g residual=%.3e after %d iterations (%s)",
                ctx.s, ctx.Y.spec_string, current, residual.norm, iterations, status)
    return EigenPair(s=ctx.s, lam=current, mu=residual.mu, field=u,
                     residual_norm=residual.norm, iterations=iterations,
                     converged=converged, history=history,
                     diagnostics={'status': status, 'preconditioner': cfg.preconditioner,
                                  'inverse_steps': inverse_steps})


# ──────────────────────────────────────────────────────────────────────────────
# Second eigenvalue (upper bound)
# ──────────────────────────────────────────────────────────────────────────────

def odd_compression(u: NodalField) -> NodalField:
    """
    Field equal to u squeezed into the left half and -u squeezed into the right half.
    """
    mesh = u.mesh
    x = (mesh.interior_nodes - mesh.a) / (mesh.b - mesh.a)
    left = u(mesh.a + 2.0 * x * (mesh.b - mesh.a))
    right = -u(mesh.a + (2.0 * x - 1.0) * (mesh.b - mesh.a))
    return NodalField(mesh, np.where(x < 0.5, left, right))


class _Loop:
    """Odd loop theta -> cos(theta) a + sin(theta) b, theta in [0, pi)."""

    def __init__(self, ctx: FunctionalContext, points: int):
        self.ctx = ctx
        self.thetas = np.pi * np.arange(points) / points

    def fields(self, a: np.ndarray, b: np.ndarray) -> List[NodalField]:
        return [self.ctx.field(math.cos(t) * a + math.sin(t) * b) for t in self.thetas]

    def values(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.array([j_value(self.ctx, v) for v in self.fields(a, b)])

    def gradients(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.array([_gradient_j(pairing_i(self.ctx, v), pairing_h(self.ctx, v))
                         for v in self.fields(a, b)])


def _soft_max(values: np.ndarray, temperature: float) -> float:
    top = values.max()
    return float(top + temperature * math.log(np.sum(np.exp((values - top) / temperature))))


def second_upper_bound(ctx: FunctionalContext, first: EigenPair,
                       cfg: SolverConfig = SolverConfig()) -> EigenPair:
    """
    Upper bound for the second variational eigenvalue.

    Minimizes max_theta J_s(cos(theta) a + sin(theta) b) over pairs (a, b),
    starting from a = first eigenfunction and b = its odd compression, by
    alternating preconditioned descent on a soft-max whose temperature halves
    every sweep. The best hard max is returned as an upper bound.

    Raises:
        SolverError: if the bound falls below the first eigenvalue
    """
    loop = _Loop(ctx, cfg.loop_points)
    preconditioner = _Preconditioner(ctx, 'fixed')

    a = first.field.coefficients.copy()
    b_field = odd_compression(first.field)
    b = b_field.coefficients / i_value(ctx, b_field)

    values = loop.values(a, b)
    best = float(values.max())
    best_pair = (a.copy(), b.copy())
    temperature = 0.05 * best
    improvement = math.inf

    for sweep in range(cfg.loop_sweeps):
        start = best
        for which in (0, 1):
            grads = loop.gradients(a, b)
            weights = np.exp((values - values.max()) / temperature)
            weights /= weights.sum()
            factors = np.cos(loop.thetas) if which == 0 else np.sin(loop.thetas)
            grad = (weights * factors) @ grads
            direction = preconditioner.solve(None, grad)
            slope = float(grad @ direction)
            if not slope > 0:
                continue
            objective = _soft_max(values, temperature)
            eta = cfg.step0 * 0.5 / max(i_value(ctx, ctx.field(direction)), 1e-300)
            while eta >= cfg.min_step:
                trial_a, trial_b = (a - eta * direction, b) if which == 0 else \
                    (a, b - eta * direction)
                try:
                    trial_values = loop.values(trial_a, trial_b)
                except ZeroFieldError:
                    trial_values = None
                if trial_values is not None and \
                        _soft_max(trial_values, temperature) <= objective - cfg.armijo * eta * slope:
                    a, b, values = trial_a, trial_b, trial_values
                    break
                eta *= cfg.backtrack
            if values.max() < best:
                best = float(values.max())
                best_pair = (a.copy(), b.copy())
        improvement = start - best
        temperature *= 0.5
        logger.debug("Loop sweep %d: best max %.10g (temperature %.3e)", sweep, best, temperature)
        if improvement <= 1e-10 * best and sweep > 0:
            break

    floor = first.lam - 1e-8 * max(1.0, first.lam)
    if best < floor:
        raise SolverError(
            f"Loop bound {best:.10g} fell below the first eigenvalue {first.lam:.10g}")

    a, b = best_pair
    final_values = loop.values(a, b)
    k = int(np.argmax(final_values))
    top = loop.fields(a, b)[k]
    top = top.with_coefficients(top.coefficients / i_value(ctx, top))
    residual = el_residual(ctx, top, best)
    logger.info("s=%g %s: second eigenvalue upper bound %.10g", ctx.s, ctx.Y.spec_string, best)
    return EigenPair(s=ctx.s, lam=best, mu=residual.mu, field=top,
                     residual_norm=residual.norm, iterations=sweep + 1,
                     converged=improvement <= 1e-6 * best, upper_bound=True,
                     diagnostics={'theta': float(loop.thetas[k])})


# ──────────────────────────────────────────────────────────────────────────────
# Quadratic oracle
# ──────────────────────────────────────────────────────────────────────────────

def _is_quadratic(Y) -> bool:
    return Y.family == 'power' and Y.params == (2.0,)


def p2_matrix_oracle(ctx: FunctionalContext) -> OracleResult:
    """
    Dense generalized eigensolve for G(t) = t^2/2.

    With A = S_H^T W S_H and B = S_I^T W S_I the Luxemburg values are
    sqrt(c^T A c / 2) and sqrt(c^T B c / 2), so J_s^2 is the Rayleigh
    quotient of (A, B) and the quotient values are square roots of the
    generalized eigenvalues.

    Raises:
        WrongFamilyError: unless Y (and any numerator override) is t^2/2
    """
    if not _is_quadratic(ctx.Y) or (ctx.h_young is not None and not _is_quadratic(ctx.h_young)):
        raise WrongFamilyError(
            f"The matrix oracle needs G(t) = t^2/2, got {ctx.numerator_young.spec_string}")
    A = gram_matrix(ctx).toarray()
    cloud = ctx.i_cloud
    B = (cloud.operator.T @ (cloud.weights[:, None] * cloud.operator.toarray()))
    asymmetry = max(float(np.max(np.abs(A - A.T))), float(np.max(np.abs(B - B.T))))
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    nu, vectors = linalg.eigh(A, B, subset_by_index=[0, 1])
    return OracleResult(lam1=math.sqrt(nu[0]), lam2=math.sqrt(nu[1]),
                        vectors=vectors, asymmetry=asymmetry)


# ──────────────────────────────────────────────────────────────────────────────
# s -> 1 sweep
# ──────────────────────────────────────────────────────────────────────────────

def richardson_limit(s_values: Sequence[float], lambdas: Sequence[float]):
    """
    Fit lambda(s) = L + c (1 - s)^alpha through the last three points.

    Falls back to linear extrapolation (alpha = 1) through the last two points
    when no exponent in [0.05, 5] fits; a single point gives (None, None).

    Returns:
        (L, alpha)
    """
    if len(lambdas) < 2:
        return None, None
    x = 1.0 - np.asarray(s_values[-3:], dtype=float)
    y = np.asarray(lambdas[-3:], dtype=float)
    if len(y) == 3 and (y[0] - y[1]) * (y[1] - y[2]) > 0:
        ratio = (y[0] - y[1]) / (y[1] - y[2])

        def mismatch(alpha):
            return (x[0] ** alpha - x[1] ** alpha) / (x[1] ** alpha - x[2] ** alpha) - ratio

        try:
            alpha = optimize.brentq(mismatch, 0.05, 5.0)
            c = (y[1] - y[2]) / (x[1] ** alpha - x[2] ** alpha)
            return float(y[2] - c * x[2] ** alpha), float(alpha)
        except ValueError:
            logger.debug("No Richardson exponent in [0.05, 5], using linear extrapolation")
    x2, y2 = x[-2:], y[-2:]
    return float(y2[1] - x2[1] * (y2[0] - y2[1]) / (x2[0] - x2[1])), 1.0


def shooting_first_eigenvalue(p: float, length: float = 1.0) -> float:
    """
    First Dirichlet eigenvalue of -(|u'|^{p-2} u')' = lambda |u|^{p-2} u on an interval.

    With lambda = 1, the solution started at u = 0 with |u'|^{p-2}u' = 1
    returns to zero at z; rescaling the interval gives lambda_p = (z / length)^p.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    if length <= 0:
        raise InvalidParameterError(f"Interval length must be positive, got {length}")

    def rhs(_, y):
        u, flux = y
        return [np.sign(flux) * abs(flux) ** (1.0 / (p - 1.0)),
                -np.sign(u) * abs(u) ** (p - 1.0)]

    def back_to_zero(_, y):
        return y[0]
    back_to_zero.terminal = True
    back_to_zero.direction = -1

    solution = solve_ivp(rhs, (0.0, 100.0), [0.0, 1.0], events=back_to_zero,
                         rtol=1e-12, atol=1e-14, first_step=1e-6)
    if not solution.t_events[0].size:
        raise SolverError(f"Shooting for p={p} did not return to zero")
    z = float(solution.t_events[0][0])
    return (z / length) ** p


def power_limit_reference(Y: YoungFunction, length: float = 1.0) -> float:
    """
    Limit quotient min ||u'||_{G_bar} / ||u||_G for G = t^p/p.

    G_bar = (2/p) G and the Luxemburg norm of c t^p/p is (c/p)^{1/p} ||.||_p,
    so the quotient is (2/p)^{1/p} lambda_p^{1/p}.

    Raises:
        WrongFamilyError: for non-power Young functions
    """
    if Y.family != 'power':
        raise WrongFamilyError(f"Shooting reference needs a power function, got {Y.spec_string}")
    p, = Y.params
    return (2.0 / p) ** (1.0 / p) * shooting_first_eigenvalue(p, length) ** (1.0 / p)


def _not_converged(pair: EigenPair) -> str:
    return (f"not converged after {pair.iterations} iterations "
            f"({pair.diagnostics['status']}, residual {pair.residual_norm:.3e})")


def stability_sweep(Y: YoungFunction, s_list: Sequence[float], mesh: Mesh1D,
                    cfg: SolverConfig = SolverConfig(),
                    spec: QuadratureSpec = QuadratureSpec(),
                    tol: float = LUXEMBURG_TOL,
                    init: Optional[NodalField] = None) -> SweepResult:
    """
    First eigenvalues along s_list, Richardson extrapolation, and the limit problem.

    Each solve warm-starts from the previous eigenfunction. An s whose solve
    raises or does not converge is recorded in failures and left out of the
    extrapolation; a non-converged limit problem is recorded under s = 1.
    The limit problem pairs ||u'||_{G_bar} with ||u||_G.

    Raises:
        InvalidParameterError: unless s_list is strictly increasing in (0, 1)
    """
    s_values = [float(s) for s in s_list]
    if not s_values or any(not (0.0 < s < 1.0) for s in s_values) or \
            any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise InvalidParameterError(f"s_list must be strictly increasing in (0, 1): {s_values}")

    warm = init if init is not None else default_init(mesh, seed=cfg.seed)
    pairs: List[EigenPair] = []
    failures: Dict[float, str] = {}
    for s in s_values:
        try:
            ctx = FunctionalContext(Y, s, mesh, spec, tol)
            pair = minimize_first(ctx, warm, cfg)
        except OrliczEigError as exc:
            logger.warning("s=%g failed: %s", s, exc)
            failures[s] = str(exc)
            continue
        warm = pair.field
        if not pair.converged:
            failures[s] = _not_converged(pair)
            logger.warning("s=%g skipped: %s", s, failures[s])
            continue
        pairs.append(pair)

    limit_ctx = FunctionalContext(Y, 1.0, mesh, spec, tol, h_young=bar_transform(Y, n=1))
    local = minimize_first(limit_ctx, warm, cfg)
    if not local.converged:
        failures[1.0] = _not_converged(local)
        logger.warning("Limit problem: %s", failures[1.0])

    done_s = [p.s for p in pairs]
    lambdas = [p.lam for p in pairs]
    extrapolated, alpha = richardson_limit(done_s, lambdas)
    gap = abs(extrapolated - local.lam) if extrapolated is not None else None
    reference = power_limit_reference(Y, mesh.b - mesh.a) \
        if Y.family == 'power' else None

    logger.info("Sweep %s: extrapolated %s, local limit %.10g, gap %s",
                Y.spec_string, extrapolated, local.lam, gap)
    return SweepResult(s_values=done_s, lambdas=lambdas, pairs=pairs, failures=failures,
                       extrapolated_limit=extrapolated, alpha=alpha, local_limit=local.lam,
                       gap=gap, reference_limit=reference)


# ──────────────────────────────────────────────────────────────────────────────
# Modular convergence
# ──────────────────────────────────────────────────────────────────────────────

def liminf_estimate(rows: Sequence[BBMRow]) -> float:
    """
    Estimate of liminf_{s -> 1} [u]_{s,G} from the rows.

    The seminorm at the largest s, or the Richardson limit through the three
    largest orders when that lies higher (seminorms rising towards the limit).
    """
    by_s = {r.s: r.seminorm for r in rows}
    orders = sorted(by_s)
    last = by_s[orders[-1]]
    limit, _ = richardson_limit(orders, [by_s[s] for s in orders])
    return last if limit is None else max(last, limit)


def bbm_check(Y: YoungFunction, u: NodalField, s_list: Sequence[float],
              spec: QuadratureSpec = QuadratureSpec(), tol: float = LUXEMBURG_TOL,
              y_bar: Optional[YoungFunction] = None) -> BBMReport:
    """
    Seminorms [u]_{s,G} and modulars Phi_{s,G}(u) against ||u'||_{G_bar}, Phi_{1,G_bar}(u).

    The liminf inequality ||u'||_{G_bar} <= L (1 + slack) is checked against
    L = liminf_estimate(rows).
    """
    if not s_list or any(not (0.0 < s < 1.0) for s in s_list):
        raise InvalidParameterError(f"s values must lie in (0, 1): {list(s_list)}")
    y_bar = y_bar if y_bar is not None else bar_transform(Y, n=1)
    rows = [BBMRow(s=float(s), seminorm=seminorm_sG(u, Y, s, spec, tol),
                   modular=modular_value(sample_fractional(u, s, spec), Y, 1.0))
            for s in s_list]
    target_norm = seminorm_sG(u, y_bar, 1.0, spec, tol)
    target_modular = modular_value(sample_gradient(u, spec), y_bar, 1.0)

    if target_norm == 0.0:
        return BBMReport(rows, 0.0, 0.0, 0.0, True)
    last = max(rows, key=lambda r: r.s)
    gap = abs(last.seminorm - target_norm) / target_norm
    estimate = liminf_estimate(rows)
    liminf_ok = target_norm <= estimate * (1.0 + BBM_SLACK)
    if not liminf_ok:
        logger.warning("liminf check failed: ||u'||=%.6g above the limit estimate %.6g",
                       target_norm, estimate)
    return BBMReport(rows, target_norm, target_modular, gap, liminf_ok, estimate)

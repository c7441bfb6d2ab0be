#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Young functions with derivatives, conjugates, growth exponents and the
s -> 1 limit transform.

Supported families:
1. power      G(t) = t^p / p
2. power-log  G(t) = t^p log(1 + t)
3. power-sum  G(t) = a t^p + b t^q
4. tabulated  monotone table (produced by bar_transform)

Every function here is pure given an immutable YoungFunction, so values can
be shared freely between threads. Array arguments are evaluated elementwise.

Usage:
    Y = parse_young_spec("powersum:2,1,4,1")
    G, g, dg = evaluate(Y, 2.0)
    Ybar = bar_transform(Y, n=1)
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from config import (
    BAR_QUAD_LIMIT, BAR_QUAD_TOL, BAR_TABLE_POINTS, BAR_TABLE_RANGE,
    EXPONENT_GRID_POINTS, EXPONENT_GRID_RANGE, FLAG_TOLERANCE,
    INEQUALITY_MARGIN, INEQUALITY_PAIR_RANGE, INEQUALITY_T_MAX,
    INVERSE_G_BOUNDS, INVERSE_G_ITERS,
)
from errors import (
    InvalidParameterError, QuadratureError, RootBracketError,
    SpecParseError, ValidationError,
)

logger = logging.getLogger(__name__)

FAMILIES = ('power', 'power-log', 'power-sum', 'tabulated')

# Spec-string prefixes accepted on the command line
SPEC_ALIASES = {
    'power': 'power',
    'powerlog': 'power-log',
    'power-log': 'power-log',
    'powersum': 'power-sum',
    'power-sum': 'power-sum',
}

PARAM_COUNTS = {'power': 1, 'power-log': 1, 'power-sum': 4}


# ──────────────────────────────────────────────────────────────────────────────
# Data Classes
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ExponentPair:
    """Growth exponents of condition (L): p_minus - 1 <= t g'/g <= p_plus - 1."""
    p_minus: float
    p_plus: float

    def __post_init__(self):
        if not (1.0 < self.p_minus <= self.p_plus < math.inf):
            raise ValidationError(
                f"Exponents must satisfy 1 < p- <= p+ < inf, got "
                f"({self.p_minus}, {self.p_plus})")


@dataclass(frozen=True)
class StructuralFlags:
    """Structural conditions gating the eigensolver."""
    sqrt_convex: bool         # G(sqrt(t)) convex
    gprime_decreasing: bool   # g' non-increasing

    def admits(self, s: float) -> bool:
        """True when the flags admit fractional order s (s = 1 needs sqrt_convex)."""
        if s >= 1.0:
            return self.sqrt_convex
        return self.sqrt_convex or self.gprime_decreasing


@dataclass(frozen=True)
class YoungTable:
    """Samples of (G, g, g') on a log grid, interpolated monotonically in log-log."""
    t: np.ndarray
    G: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    p_minus: float     # Left power-law extrapolation exponent
    p_plus: float      # Right power-law extrapolation exponent
    source: str = ""

    def __post_init__(self):
        arrays = (self.t, self.G, self.g, self.dg)
        if len({len(a) for a in arrays}) != 1 or len(self.t) < 4:
            raise ValidationError("Table columns must have equal length >= 4")
        if np.any(np.diff(self.t) <= 0):
            raise ValidationError("Table abscissae must be strictly increasing")
        for name, column in (('G', self.G), ('g', self.g), ('dg', self.dg)):
            if not np.all(np.isfinite(column)) or np.any(column <= 0):
                raise ValidationError(f"Table column {name} must be finite and positive")
        if np.any(np.diff(self.G) <= 0) or np.any(np.diff(self.g) < 0):
            raise ValidationError("Tabulated G must increase and g must not decrease")


@dataclass
class CheckResult:
    """Worst-case margin of one inequality over the sampled inputs."""
    name: str
    worst_margin: float
    passed: bool
    samples: int
    witness: Dict[str, float] = field(default_factory=dict)


@dataclass
class InequalityReport:
    """Outcome of check_inequalities for one Young function."""
    young: str
    exponents: ExponentPair
    flags: StructuralFlags
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            'young': self.young,
            'p_minus': self.exponents.p_minus,
            'p_plus': self.exponents.p_plus,
            'sqrt_convex': self.flags.sqrt_convex,
            'gprime_decreasing': self.flags.gprime_decreasing,
            'passed': self.passed,
            'checks': [
                {'name': c.name, 'worst_margin': c.worst_margin, 'passed': c.passed,
                 'samples': c.samples, 'witness': c.witness}
                for c in self.checks
            ],
        }


# ──────────────────────────────────────────────────────────────────────────────
# Young function
# ──────────────────────────────────────────────────────────────────────────────

def _on_positive(t, formula: Callable[[np.ndarray], np.ndarray], at_zero: float):
    """Evaluate formula on t > 0 and return at_zero elsewhere; scalars stay scalars."""
    arr = np.asarray(t, dtype=float)
    out = np.full(arr.shape, at_zero, dtype=float)
    positive = arr > 0
    if np.any(positive):
        with np.errstate(over='ignore'):
            out[positive] = formula(arr[positive])
    if arr.ndim == 0:
        return float(out)
    return out


class YoungFunction:
    """
    Immutable Young function G with g = G' and g'.

    Instances are built by make_young (or bar_transform for the tabulated
    family). Methods accept nonnegative scalars or arrays.
    """

    def __init__(self, family: str, params: Tuple[float, ...] = (),
                 table: Optional[YoungTable] = None):
        """
        Initialize a Young function without validation (see make_young).

        Args:
            family: One of FAMILIES
            params: Family parameters (p,), (p,), or (p, a, q, b)
            table: Sample table, required for the tabulated family
        """
        self.family = family
        self.params = tuple(float(x) for x in params)
        self.table = table

    def __repr__(self) -> str:
        return f"YoungFunction({self.spec_string})"

    @property
    def spec_string(self) -> str:
        """CLI-style description, e.g. 'power:2' or 'bar(power:3)'."""
        if self.family == 'tabulated':
            return f"bar({self.table.source})" if self.table.source else "tabulated"
        prefix = {'power': 'power', 'power-log': 'powerlog', 'power-sum': 'powersum'}[self.family]
        return f"{prefix}:" + ",".join(f"{x:g}" for x in self.params)

    # -- family formulas ------------------------------------------------------

    def G(self, t):
        """G(t) for t >= 0."""
        if self.family == 'power':
            p, = self.params
            return _on_positive(t, lambda x: x ** p / p, 0.0)
        if self.family == 'power-log':
            p, = self.params
            return _on_positive(t, lambda x: x ** p * np.log1p(x), 0.0)
        if self.family == 'power-sum':
            p, a, q, b = self.params
            return _on_positive(t, lambda x: a * x ** p + b * x ** q, 0.0)
        return _on_positive(t, lambda x: self._tabulated(x, 'G'), 0.0)

    def g(self, t):
        """g(t) = G'(t) for t >= 0."""
        if self.family == 'power':
            p, = self.params
            return _on_positive(t, lambda x: x ** (p - 1.0), 0.0)
        if self.family == 'power-log':
            p, = self.params
            return _on_positive(
                t, lambda x: p * x ** (p - 1.0) * np.log1p(x) + x ** p / (1.0 + x), 0.0)
        if self.family == 'power-sum':
            p, a, q, b = self.params
            return _on_positive(
                t, lambda x: a * p * x ** (p - 1.0) + b * q * x ** (q - 1.0), 0.0)
        return _on_positive(t, lambda x: self._tabulated(x, 'g'), 0.0)

    def dg(self, t):
        """g'(t) for t >= 0; the value at 0 is the right limit g'(0+)."""
        return _on_positive(t, self._dg_positive, self._dg_at_zero())

    def _dg_positive(self, x: np.ndarray) -> np.ndarray:
        if self.family == 'power':
            p, = self.params
            return (p - 1.0) * x ** (p - 2.0)
        if self.family == 'power-log':
            p, = self.params
            return (p * (p - 1.0) * x ** (p - 2.0) * np.log1p(x)
                    + 2.0 * p * x ** (p - 1.0) / (1.0 + x)
                    - x ** p / (1.0 + x) ** 2)
        if self.family == 'power-sum':
            p, a, q, b = self.params
            return a * p * (p - 1.0) * x ** (p - 2.0) + b * q * (q - 1.0) * x ** (q - 2.0)
        return self._tabulated(x, 'dg')

    def _dg_at_zero(self) -> float:
        if self.family == 'power':
            terms = [(1.0 / self.params[0], self.params[0])]
        elif self.family == 'power-sum':
            p, a, q, b = self.params
            terms = [(a, p), (b, q)]
        elif self.family == 'power-log':
            return 0.0
        else:
            if self.table.p_minus > 2.0:
                return 0.0
            return math.inf if self.table.p_minus < 2.0 else float(self.table.dg[0])
        value = 0.0
        for coef, e in terms:
            if e < 2.0:
                return math.inf
            if e == 2.0:
                value += coef * e * (e - 1.0)
        return value

    # -- tabulated family -----------------------------------------------------

    @cached_property
    def _interpolants(self) -> Dict[str, PchipInterpolator]:
        log_t = np.log(self.table.t)
        return {
            'G': PchipInterpolator(log_t, np.log(self.table.G)),
            'g': PchipInterpolator(log_t, np.log(self.table.g)),
            'dg': PchipInterpolator(log_t, np.log(self.table.dg)),
        }

    def _tabulated(self, x: np.ndarray, column: str) -> np.ndarray:
        table = self.table
        shift = {'G': 0.0, 'g': 1.0, 'dg': 2.0}[column]
        values = getattr(table, column)
        out = np.empty_like(x)
        left = x < table.t[0]
        right = x > table.t[-1]
        inside = ~(left | right)
        if np.any(inside):
            out[inside] = np.exp(self._interpolants[column](np.log(x[inside])))
        # Power-law extrapolation with p- on the left and p+ on the right
        if np.any(left):
            out[left] = values[0] * (x[left] / table.t[0]) ** (table.p_minus - shift)
        if np.any(right):
            out[right] = values[-1] * (x[right] / table.t[-1]) ** (table.p_plus - shift)
        return out

    # -- cached diagnostics ---------------------------------------------------

    @cached_property
    def exponents(self) -> ExponentPair:
        return estimate_exponents(self)

    @cached_property
    def flags(self) -> StructuralFlags:
        return structural_flags(self)


# ──────────────────────────────────────────────────────────────────────────────
# Construction
# ──────────────────────────────────────────────────────────────────────────────

def make_young(family: str, params=(), table: Optional[YoungTable] = None,
               validate: bool = True) -> YoungFunction:
    """
    Build a Young function and validate its sampled invariants.

    Args:
        family: One of FAMILIES (CLI aliases such as 'powerlog' are accepted)
        params: Family parameters; exponents must exceed 1, coefficients be positive
        table: Sample table for the tabulated family
        validate: Run the sampled invariant check (G convex increasing, condition (L))

    Returns:
        A validated YoungFunction

    Raises:
        InvalidParameterError: on bad parameters
        ValidationError: when sampled invariants fail
    """
    family = SPEC_ALIASES.get(family, family)
    if family not in FAMILIES:
        raise InvalidParameterError(f"Unknown Young family '{family}'")

    if family == 'tabulated':
        if table is None:
            raise InvalidParameterError("The tabulated family requires a table")
        Y = YoungFunction(family, (), table)
    else:
        params = tuple(float(x) for x in params)
        expected = PARAM_COUNTS[family]
        if len(params) != expected:
            raise InvalidParameterError(
                f"Family '{family}' takes {expected} parameter(s), got {len(params)}")
        if not all(math.isfinite(x) for x in params):
            raise InvalidParameterError(f"Non-finite parameter in {params}")
        if family == 'power-sum':
            p, a, q, b = params
            exps, coefs = (p, q), (a, b)
        else:
            exps, coefs = params, ()
        if any(e <= 1.0 for e in exps):
            raise InvalidParameterError(f"Exponents must exceed 1, got {exps}")
        if any(c <= 0.0 for c in coefs):
            raise InvalidParameterError(f"Coefficients must be positive, got {coefs}")
        Y = YoungFunction(family, params)

    if validate:
        validate_young(Y)
    return Y


def parse_young_spec(spec: str) -> YoungFunction:
    """
    Parse a `family:param[,param...]` string such as 'power:2' or 'powersum:2,1,4,1'.

    Raises:
        SpecParseError: for malformed strings
        InvalidParameterError: for parameters violating the family constraints
    """
    if not spec or ':' not in spec:
        raise SpecParseError(f"Young spec must look like 'family:p[,..]', got '{spec}'")
    name, _, raw = spec.partition(':')
    name = name.strip().lower()
    if name not in SPEC_ALIASES:
        raise SpecParseError(f"Unknown Young family '{name}' in '{spec}'")
    try:
        params = tuple(float(x) for x in raw.split(',') if x.strip())
    except ValueError as exc:
        raise SpecParseError(f"Bad parameter list in '{spec}': {exc}") from exc
    return make_young(SPEC_ALIASES[name], params)


def _log_grid(points: int = EXPONENT_GRID_POINTS,
              bounds: Tuple[float, float] = EXPONENT_GRID_RANGE) -> np.ndarray:
    return np.logspace(math.log10(bounds[0]), math.log10(bounds[1]), points)


def validate_young(Y: YoungFunction) -> None:
    """
    Sampled check of the Young-function invariants on the exponent grid,
    including the estimated exponent pair (and the extrapolation exponents of
    a table).

    Raises:
        ValidationError: with the first failing condition
    """
    t = _log_grid()
    G, g, dg = Y.G(t), Y.g(t), Y.dg(t)
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(g)) and np.all(np.isfinite(dg))):
        raise ValidationError(f"{Y.spec_string}: non-finite values on the sample grid")
    if Y.G(0.0) != 0.0 or Y.g(0.0) != 0.0:
        raise ValidationError(f"{Y.spec_string}: G(0) and g(0) must vanish")
    if np.any(G <= 0) or np.any(np.diff(G) <= 0):
        raise ValidationError(f"{Y.spec_string}: G must be positive and strictly increasing")
    if np.any(g <= 0) or np.any(np.diff(g) < -FLAG_TOLERANCE * g[1:]):
        raise ValidationError(f"{Y.spec_string}: g must be positive and non-decreasing")
    ratio = t * dg / g
    if np.min(ratio) <= 0.0:
        raise ValidationError(f"{Y.spec_string}: condition (L) fails, t g'/g <= 0")
    # ExponentPair rejects anything but 1 < p- <= p+ < inf
    if Y.table is not None:
        ExponentPair(Y.table.p_minus, Y.table.p_plus)
    Y.exponents


# ──────────────────────────────────────────────────────────────────────────────
# Operations
# ──────────────────────────────────────────────────────────────────────────────

def evaluate(Y: YoungFunction, t) -> Tuple:
    """
    Return (G(t), g(t), g'(t)) for t >= 0.

    Raises:
        InvalidParameterError: if t is negative
    """
    if np.any(np.asarray(t, dtype=float) < 0):
        raise InvalidParameterError("Young functions are evaluated at t >= 0")
    return Y.G(t), Y.g(t), Y.dg(t)


def inverse_g(Y: YoungFunction, t) -> np.ndarray:
    """
    Solve g(w) = t for w by bisection in log w (vectorized).

    Raises:
        RootBracketError: if some t lies outside g([lo, hi]) for the configured bounds
    """
    target = np.atleast_1d(np.asarray(t, dtype=float))
    lo_w, hi_w = INVERSE_G_BOUNDS
    positive = target > 0
    result = np.zeros_like(target)
    if not np.any(positive):
        return result
    tp = target[positive]
    if np.any(Y.g(lo_w) > tp) or np.any(Y.g(hi_w) < tp):
        bad = tp[(Y.g(lo_w) > tp) | (Y.g(hi_w) < tp)][0]
        raise RootBracketError(
            f"{Y.spec_string}: cannot bracket g^-1({bad:g}) in [{lo_w:g}, {hi_w:g}]")

    lo = np.full_like(tp, math.log(lo_w))
    hi = np.full_like(tp, math.log(hi_w))
    for _ in range(INVERSE_G_ITERS):
        mid = 0.5 * (lo + hi)
        above = Y.g(np.exp(mid)) > tp
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.max(hi - lo) < 1e-15:
            break
    result[positive] = np.exp(0.5 * (lo + hi))
    return result


def conjugate(Y: YoungFunction, t):
    """
    Complementary function G~(t) = t g^{-1}(t) - G(g^{-1}(t)).

    Exact for the power family (dual exponent p' = p/(p-1)); otherwise g^{-1}
    comes from monotone bracketing. Scalars in, scalar out.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise InvalidParameterError("The conjugate is evaluated at t >= 0")
    if Y.family == 'power':
        p, = Y.params
        q = p / (p - 1.0)
        return _on_positive(arr, lambda x: x ** q / q, 0.0)
    flat = np.atleast_1d(arr).astype(float)
    w = inverse_g(Y, flat)
    out = np.where(flat > 0, flat * w - Y.G(w), 0.0)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def _closed_form_exponents(Y: YoungFunction) -> Optional[Tuple[float, float]]:
    if Y.family == 'power':
        p, = Y.params
        return p, p
    if Y.family == 'power-log':
        p, = Y.params
        return p, p + 1.0
    if Y.family == 'power-sum':
        p, _, q, _ = Y.params
        return min(p, q), max(p, q)
    return None


def estimate_exponents(Y: YoungFunction, grid: Optional[np.ndarray] = None) -> ExponentPair:
    """
    Estimate (p-, p+) as 1 + min/max of t g'(t)/g(t) over a log grid.

    Families with closed-form envelopes return the envelope widened by the
    sampled extremes, so the power family gives exactly (p, p).

    Args:
        Y: Young function
        grid: Positive grid spanning at least [1e-6, 1e6] (default: 2048 log points)
    """
    if grid is None:
        grid = _log_grid()
    grid = np.asarray(grid, dtype=float)
    if grid.min() > EXPONENT_GRID_RANGE[0] * (1 + 1e-12) or \
            grid.max() < EXPONENT_GRID_RANGE[1] * (1 - 1e-12):
        raise InvalidParameterError("Exponent grid must span at least [1e-6, 1e6]")

    ratio = grid * Y.dg(grid) / Y.g(grid)
    p_minus = 1.0 + float(np.min(ratio))
    p_plus = 1.0 + float(np.max(ratio))

    envelope = _closed_form_exponents(Y)
    if envelope is not None:
        if Y.family == 'power':
            return ExponentPair(envelope[0], envelope[1])
        p_minus = min(p_minus, envelope[0])
        p_plus = max(p_plus, envelope[1])
    return ExponentPair(p_minus, p_plus)


def structural_flags(Y: YoungFunction) -> StructuralFlags:
    """
    Decide whether G(sqrt(t)) is convex and whether g' is non-increasing.

    Power functions are decided analytically (p >= 2 and p <= 2); other
    families by sampled difference tests with relative tolerance FLAG_TOLERANCE.
    A flag whose samples disagree beyond the tolerance is reported false.
    When either test is indeterminate (differences of both signs beyond the
    tolerance) both flags are reported false.
    """
    if Y.family == 'power':
        p, = Y.params
        return StructuralFlags(sqrt_convex=p >= 2.0, gprime_decreasing=p <= 2.0)

    x = _log_grid()
    t = x ** 2
    H = Y.G(x)   # H(t) = G(sqrt(t)) sampled at t = x^2
    slopes = np.diff(H) / np.diff(t)
    second = 2.0 * np.diff(slopes) / (t[2:] - t[:-2])
    scale = FLAG_TOLERANCE * H[1:-1] / t[1:-1] ** 2
    sqrt_convex = bool(np.all(second >= -scale))
    sqrt_mixed = bool(np.any(second > scale) and np.any(second < -scale))

    dg = Y.dg(x)
    steps = np.diff(dg)
    bound = FLAG_TOLERANCE * np.abs(dg[:-1])
    gprime_decreasing = bool(np.all(steps <= bound))
    gprime_mixed = bool(np.any(steps > bound) and np.any(steps < -bound))

    if sqrt_mixed or gprime_mixed:
        return StructuralFlags(sqrt_convex=False, gprime_decreasing=False)
    return StructuralFlags(sqrt_convex=sqrt_convex, gprime_decreasing=gprime_decreasing)


def _signed_g(Y: YoungFunction, a: np.ndarray) -> np.ndarray:
    """g(|a|) a/|a| with the value 0 at a = 0."""
    return np.sign(a) * Y.g(np.abs(a))


def _check(name: str, margins: np.ndarray, inputs: Dict[str, np.ndarray]) -> CheckResult:
    if margins.size == 0:
        return CheckResult(name, math.inf, True, 0)
    worst = int(np.argmin(margins))
    witness = {k: float(v[worst]) for k, v in inputs.items()}
    return CheckResult(name, float(margins[worst]),
                       bool(margins[worst] >= -INEQUALITY_MARGIN),
                       int(margins.size), witness)


def check_inequalities(Y: YoungFunction, sample_count: int = 100000, seed: int = 0,
                       exponents: Optional[ExponentPair] = None) -> InequalityReport:
    """
    Sample the structural inequalities of Young functions and report margins.

    Checks (relative margins, violated when below -INEQUALITY_MARGIN):
    - delta2:   p- <= t g(t)/G(t) <= p+
    - prop1:    p-(p- - 1) G <= t^2 g' <= p+(p+ - 1) G
    - lemita:   G~(g(t)) <= (p+ - 1) G(t)
    - young:    t w <= G(w) + G~(t), with equality at t = g(w)
    - monotonicity (sqrt_convex): (g(|b|)b/|b| - g(|a|)a/|a|)(b - a)
      >= 4 G(|b-a|/2) >= 2^{2-p+} G(|b-a|)
    - monotonicity (g' decreasing): the same product is >= 0, >= b^2 g'(b)/(p+ - 1)
      when a = 0, and >= (b-a)^2 g'(max(|a|,|b|)) on same-sign pairs

    Args:
        Y: Young function
        sample_count: Number of samples per check (>= 1)
        seed: Seed of the numpy Generator
        exponents: Override of estimate_exponents(Y)

    Returns:
        InequalityReport (violations are reported, never raised)
    """
    if sample_count < 1:
        raise InvalidParameterError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    ex = exponents or Y.exponents
    flags = Y.flags
    pm, pp = ex.p_minus, ex.p_plus
    report = InequalityReport(young=Y.spec_string, exponents=ex, flags=flags)

    # Half uniform on (0, T), half log-uniform on [1e-6, T]
    half = sample_count // 2
    t = np.concatenate([
        rng.uniform(0.0, INEQUALITY_T_MAX, sample_count - half),
        np.exp(rng.uniform(math.log(1e-6), math.log(INEQUALITY_T_MAX), half)),
    ])
    t = t[t > 0]
    G, g, dg = Y.G(t), Y.g(t), Y.dg(t)

    ratio = t * g / G
    report.checks.append(_check('delta2_lower', ratio - pm, {'t': t}))
    report.checks.append(_check('delta2_upper', pp - ratio, {'t': t}))

    second = t ** 2 * dg / G
    report.checks.append(_check('prop1_lower', second - pm * (pm - 1.0), {'t': t}))
    report.checks.append(_check('prop1_upper', pp * (pp - 1.0) - second, {'t': t}))

    conj_at_g = conjugate(Y, g)
    report.checks.append(_check('lemita', ((pp - 1.0) * G - conj_at_g) / G, {'t': t}))

    w = np.exp(rng.uniform(math.log(1e-6), math.log(INEQUALITY_T_MAX), t.size))
    Gw = Y.G(w)
    conj_t = conjugate(Y, t)
    report.checks.append(_check(
        'young_inequality', (Gw + conj_t - t * w) / (1.0 + Gw + conj_t), {'t': t, 'w': w}))
    gw = Y.g(w)
    gap = np.abs(Gw + conjugate(Y, gw) - w * gw) / (1.0 + Gw)
    report.checks.append(_check('young_equality', 1e-6 - gap, {'w': w}))

    r = INEQUALITY_PAIR_RANGE
    a = rng.uniform(-r, r, sample_count)
    b = rng.uniform(-r, r, sample_count)
    distinct = a != b
    a, b = a[distinct], b[distinct]
    product = (_signed_g(Y, b) - _signed_g(Y, a)) * (b - a)
    gap_ab = np.abs(b - a)
    G_gap = Y.G(gap_ab)

    if flags.sqrt_convex:
        report.checks.append(_check(
            'monotonicity_half_gap', (product - 4.0 * Y.G(0.5 * gap_ab)) / G_gap,
            {'a': a, 'b': b}))
        report.checks.append(_check(
            'monotonicity_sqrt_convex', (product - 2.0 ** (2.0 - pp) * G_gap) / G_gap,
            {'a': a, 'b': b}))

    if flags.gprime_decreasing:
        scale = gap_ab * (Y.g(np.abs(a)) + Y.g(np.abs(b)))
        report.checks.append(_check(
            'monotonicity_positive', product / scale, {'a': a, 'b': b}))
        bz = b[b != 0]
        gz = Y.g(np.abs(bz)) * np.abs(bz)
        report.checks.append(_check(
            'monotonicity_a_zero', (gz - bz ** 2 * Y.dg(np.abs(bz)) / (pp - 1.0)) / gz,
            {'b': bz}))
        same = (a * b) > 0
        a_s, b_s, prod_s = a[same], b[same], product[same]
        bound = (b_s - a_s) ** 2 * Y.dg(np.maximum(np.abs(a_s), np.abs(b_s)))
        report.checks.append(_check(
            'monotonicity_same_sign', (prod_s - bound) / prod_s, {'a': a_s, 'b': b_s}))

    for check in report.violations:
        logger.warning("%s: %s violated (margin %.3e at %s)",
                       Y.spec_string, check.name, check.worst_margin, check.witness)
    return report


# ──────────────────────────────────────────────────────────────────────────────
# Limit transform
# ──────────────────────────────────────────────────────────────────────────────

def _adaptive_quad(f: Callable[[float], float], lo: float, hi: float,
                   quad_tol: float, **kwargs) -> float:
    """scipy quad to relative tolerance quad_tol; raise when refinement runs out."""
    result = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=quad_tol,
                            limit=BAR_QUAD_LIMIT, full_output=1, **kwargs)
    if len(result) > 3:
        raise QuadratureError(f"Quadrature did not converge on [{lo}, {hi}]: {result[3]}")
    return result[0]


def _radial_integral(Y: YoungFunction, c: float, column: int, quad_tol: float) -> float:
    """
    Column 0: int_0^1 G(cu) du/u, column 1: int_0^1 g(cu) du,
    column 2: int_0^1 g'(cu) u du.

    All three integrands behave like u^{p- - 1} near u = 0.
    """
    if c <= 0.0:
        return 0.0
    if column == 0:
        return _adaptive_quad(lambda u: Y.G(c * u) / u, 0.0, 1.0, quad_tol)
    if column == 1:
        return _adaptive_quad(lambda u: Y.g(c * u), 0.0, 1.0, quad_tol)
    return _adaptive_quad(lambda u: Y.dg(c * u) * u, 0.0, 1.0, quad_tol)


def _sphere_area(k: int) -> float:
    """Surface measure of the unit sphere S^k in R^{k+1}."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / special.gamma((k + 1) / 2.0)


def bar_transform(Y: YoungFunction, n: int = 1, quad_tol: float = BAR_QUAD_TOL,
                  points: int = BAR_TABLE_POINTS) -> YoungFunction:
    """
    Tabulate the limit Young function

        G_bar(t) = int_{S^{n-1}} int_0^1 G(t |z_n| u) du/u dS_z,

    the s-independent form of the s -> 1 limit obtained with u = r^{1-s}.
    g_bar and g_bar' are tabulated by differentiating under the integral.
    For n = 1 the sphere integral is the two-point sum (factor 2).

    Args:
        Y: Young function
        n: Space dimension (>= 1)
        quad_tol: Relative tolerance of the adaptive quadrature
        points: Number of log-spaced table points over BAR_TABLE_RANGE

    Returns:
        Tabulated YoungFunction with power-law extrapolation outside the table

    Raises:
        QuadratureError: when adaptive refinement exceeds its budget
    """
    if n < 1:
        raise InvalidParameterError(f"Dimension must be >= 1, got {n}")
    if quad_tol <= 0:
        raise InvalidParameterError("quad_tol must be positive")

    t = _log_grid(points, BAR_TABLE_RANGE)
    Gb = np.empty_like(t)
    gb = np.empty_like(t)
    dgb = np.empty_like(t)

    columns = (Gb, gb, dgb)
    if n == 1:
        for i, ti in enumerate(t):
            for column, out in enumerate(columns):
                out[i] = 2.0 * _radial_integral(Y, ti, column, quad_tol)
    else:
        # int_{S^{n-1}} F(|z_n|) dS = |S^{n-2}| * 2 int_0^1 F(x) (1-x^2)^{(n-3)/2} dx
        # Column k carries the factor |z_n|^k from differentiating in t
        beta = (n - 3) / 2.0
        area = 2.0 * _sphere_area(n - 2)
        for i, ti in enumerate(t):
            for column, out in enumerate(columns):
                def integrand(x, column=column, ti=ti):
                    return (x ** column * _radial_integral(Y, ti * x, column, quad_tol)
                            * (1.0 + x) ** beta)
                out[i] = area * _adaptive_quad(integrand, 0.0, 1.0, quad_tol,
                                               weight='alg', wvar=(0.0, beta))

    ex = Y.exponents
    table = YoungTable(t=t, G=Gb, g=gb, dg=dgb, p_minus=ex.p_minus, p_plus=ex.p_plus,
                       source=Y.spec_string if n == 1 else f"{Y.spec_string},n={n}")
    logger.info("Tabulated G_bar for %s (n=%d, %d points)", Y.spec_string, n, points)
    return make_young('tabulated', table=table)

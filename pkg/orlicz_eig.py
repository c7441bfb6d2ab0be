#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Main orlicz_eig CLI script.

Subcommands:
1. validate-young  Growth exponents, structural flags and inequality margins
2. eig             First eigenvalue by constrained descent
3. eig2            First eigenvalue plus an upper bound for the second
4. sweep           lambda(s) for s -> 1 against the limit problem
5. bbm             [u]_{s,G} -> ||u'||_{G_bar} for sin on the domain
6. barg            Tabulate the limit Young function G_bar
7. oracle-p2       Dense matrix eigenvalues for G(t) = t^2/2
8. props           Invariant suite on seeded fields

Usage:
    python orlicz_eig.py validate-young --young powersum:2,1,4,1
    python orlicz_eig.py eig --young power:2 --s 1 --n 256
    python orlicz_eig.py sweep --young power:3 --out sweep_p3
    python orlicz_eig.py barg --young power:3 --csv

Exit codes: 0 success, 1 numerical failure, 2 configuration or parse failure.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from config import (
    BAR_COLUMNS, BBM_COLUMNS, DEFAULT_DOMAIN, DEFAULT_GAP_TOL, DEFAULT_MESH_N,
    DEFAULT_S_LIST, DEFAULT_SEED, DIAGONAL_GRADING, EXTERIOR_TOL, FIELD_COLUMNS,
    GAUSS_ORDER, LUXEMBURG_TOL, MAX_ITERS, OUTPUT_DIR, RESIDUAL_TOL,
    SCHEMA_VERSION, SWEEP_COLUMNS, THREADS_ENV_VAR, setup_logging,
)
from discretization import (
    NodalField, QuadratureSpec, field_rows, interpolate, make_mesh,
)
from eigensolver import (
    SolverConfig, bbm_check, default_init, minimize_first, p2_matrix_oracle,
    second_upper_bound, stability_sweep,
)
from errors import InvalidParameterError, OrliczEigError, SpecParseError
from functionals import (
    FunctionalContext, frechet_dh, frechet_di, h_value, i_value, pairing_h, pairing_i,
)
from orlicz_norms import luxemburg
from young_functions import (
    YoungFunction, bar_transform, check_inequalities, parse_young_spec,
)

logger = logging.getLogger(__name__)

# Families exercised by `props` when no --young is given
PROPERTY_FAMILIES = ('power:2', 'power:1.5', 'power:3', 'powersum:2,1,4,1', 'powerlog:2')

DEFAULT_YOUNG = 'power:2'

BAR_GRID = np.logspace(-3.0, 3.0, 61)


# ──────────────────────────────────────────────────────────────────────────────
# Experiment configuration
# ──────────────────────────────────────────────────────────────────────────────

def _parse_domain(raw) -> Tuple[float, float]:
    if isinstance(raw, (tuple, list)):
        values = [float(x) for x in raw]
    else:
        try:
            values = [float(x) for x in str(raw).split(',')]
        except ValueError as exc:
            raise SpecParseError(f"Domain must look like 'a,b', got '{raw}'") from exc
    if len(values) != 2:
        raise SpecParseError(f"Domain must have two endpoints, got '{raw}'")
    return values[0], values[1]


def _parse_float_list(raw) -> Tuple[float, ...]:
    if isinstance(raw, (tuple, list)):
        return tuple(float(x) for x in raw)
    try:
        return tuple(float(x) for x in str(raw).split(',') if x.strip())
    except ValueError as exc:
        raise SpecParseError(f"Expected a comma-separated list of numbers, got '{raw}'") from exc


@dataclass
class ExperimentConfig:
    """Fully resolved experiment settings (file values overridden by flags)."""
    command: str = 'eig'
    young: Optional[str] = None
    domain: Tuple[float, float] = DEFAULT_DOMAIN
    n: int = DEFAULT_MESH_N
    s: float = 0.5
    s_list: Tuple[float, ...] = DEFAULT_S_LIST
    tol: float = LUXEMBURG_TOL
    seed: int = DEFAULT_SEED
    gap_tol: float = DEFAULT_GAP_TOL
    gauss_order: int = GAUSS_ORDER
    diagonal_grading: int = DIAGONAL_GRADING
    exterior_tol: float = EXTERIOR_TOL
    max_iters: int = MAX_ITERS
    residual_tol: float = RESIDUAL_TOL
    preconditioner: str = 'picard'
    init: str = 'parabola'
    n_dim: int = 1
    samples: int = 100000
    out: Optional[str] = None
    fmt: str = 'json'

    # Converters applied to config-file strings and flag values
    CONVERTERS = {
        'young': str, 'domain': _parse_domain, 'n': int, 's': float,
        's_list': _parse_float_list, 'tol': float, 'seed': int, 'gap_tol': float,
        'gauss_order': int, 'diagonal_grading': int, 'exterior_tol': float,
        'max_iters': int, 'residual_tol': float, 'preconditioner': str, 'init': str,
        'n_dim': int, 'samples': int, 'out': str, 'fmt': str,
    }

    def update(self, values: Dict[str, object], source: str) -> None:
        for key, raw in values.items():
            if raw is None:
                continue
            converter = self.CONVERTERS.get(key)
            if converter is None:
                raise SpecParseError(f"Unknown setting '{key}' in {source}")
            try:
                setattr(self, key, converter(raw))
            except (TypeError, ValueError) as exc:
                raise SpecParseError(f"Bad value for '{key}' in {source}: {raw}") from exc

    def resolved(self) -> dict:
        """Audit record of every setting (no paths or timestamps)."""
        record = {f.name: getattr(self, f.name) for f in fields(self) if f.name != 'out'}
        record['domain'] = list(self.domain)
        record['s_list'] = list(self.s_list)
        return record

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.gauss_order, self.diagonal_grading, self.exterior_tol)

    def solver(self) -> SolverConfig:
        return SolverConfig(max_iters=self.max_iters, residual_tol=self.residual_tol,
                            seed=self.seed, preconditioner=self.preconditioner)

    def young_function(self) -> YoungFunction:
        return parse_young_spec(self.young or DEFAULT_YOUNG)

    def mesh(self):
        return make_mesh(self.domain[0], self.domain[1], self.n)


def read_config_file(path: Path) -> Dict[str, str]:
    """
    Read a flat key=value file; '#' starts a comment, dashes in keys become underscores.

    Raises:
        SpecParseError: for unreadable files or lines without '='
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise SpecParseError(f"Cannot read config file {path}: {exc}") from exc
    values = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise SpecParseError(f"{path}:{number}: expected key=value, got '{line}'")
        key, _, value = line.partition('=')
        values[key.strip().replace('-', '_')] = value.strip()
    return values


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    if args.config is not None:
        cfg.update(read_config_file(args.config), str(args.config))
    overrides = {name: getattr(args, name, None) for name in ExperimentConfig.CONVERTERS}
    cfg.update(overrides, 'command line')
    if cfg.fmt not in ('json', 'csv'):
        raise InvalidParameterError(f"Output format must be json or csv, got '{cfg.fmt}'")
    return cfg


# ──────────────────────────────────────────────────────────────────────────────
# Output
# ──────────────────────────────────────────────────────────────────────────────

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _record(cfg: ExperimentConfig, result: dict) -> dict:
    return {'schema_version': SCHEMA_VERSION, 'command': cfg.command,
            'config': cfg.resolved(), 'result': result}


def _csv_text(rows: List[dict], columns: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _out_path(out: str) -> Path:
    path = Path(out)
    if path.parent == Path('.'):
        path = OUTPUT_DIR / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def emit(cfg: ExperimentConfig, result: dict, rows: Optional[List[dict]] = None,
         columns: Optional[List[str]] = None) -> None:
    """
    Write the JSON record and optional CSV table.

    With --out both go to files (<out>.json, <out>.csv); otherwise the format
    chosen by --json/--csv goes to stdout.
    """
    text = json.dumps(_jsonable(_record(cfg, result)), sort_keys=True, indent=2) + '\n'
    table = _csv_text(rows, columns) if rows is not None else None
    if cfg.out:
        base = _out_path(cfg.out)
        json_path = base.with_suffix('.json')
        json_path.write_text(text, encoding='utf-8')
        print(f"Wrote JSON record to {json_path}")
        if table is not None:
            csv_path = base.with_suffix('.csv')
            csv_path.write_text(table, encoding='utf-8')
            print(f"Wrote {len(rows)} rows to {csv_path}")
    elif cfg.fmt == 'csv' and table is not None:
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)


def banner(cfg: ExperimentConfig, title: str, lines: List[str]) -> None:
    """Console banner, only when results go to files (stdout stays machine-readable otherwise)."""
    if not cfg.out:
        return
    print(title)
    print(f"{'='*60}")
    for line in lines:
        print(line)
    print(f"{'='*60}")


def summary(cfg: ExperimentConfig, lines: List[str]) -> None:
    if not cfg.out:
        return
    print(f"\n{'='*60}")
    print("SUMMARY")
    print(f"{'='*60}")
    for line in lines:
        print(line)


# ──────────────────────────────────────────────────────────────────────────────
# Commands
# ──────────────────────────────────────────────────────────────────────────────

def _context(cfg: ExperimentConfig, Y: YoungFunction, s: float, mesh=None) -> FunctionalContext:
    return FunctionalContext(Y, s, mesh or cfg.mesh(), cfg.quadrature(), cfg.tol)


def cmd_validate_young(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    banner(cfg, "Young function check", [f"Young: {Y.spec_string}", f"Samples: {cfg.samples}",
                                         f"Seed: {cfg.seed}"])
    report = check_inequalities(Y, cfg.samples, cfg.seed)
    emit(cfg, report.to_dict())
    summary(cfg, [f"p- = {report.exponents.p_minus:.6g}, p+ = {report.exponents.p_plus:.6g}",
                  f"sqrt_convex: {report.flags.sqrt_convex}",
                  f"gprime_decreasing: {report.flags.gprime_decreasing}",
                  f"Violated checks: {len(report.violations)} of {len(report.checks)}"])
    return 0 if report.passed else 1


def cmd_eig(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    mesh = cfg.mesh()
    ctx = _context(cfg, Y, cfg.s, mesh)
    banner(cfg, "First eigenvalue", [f"Young: {Y.spec_string}", f"s: {cfg.s:g}",
                                     f"Domain: {cfg.domain}, n = {cfg.n}", f"Init: {cfg.init}"])
    pair = minimize_first(ctx, default_init(mesh, cfg.init, cfg.seed), cfg.solver())
    result = pair.to_dict()
    result['young'] = Y.spec_string
    emit(cfg, result, field_rows(pair.field), FIELD_COLUMNS)
    summary(cfg, [f"lambda = {pair.lam:.10g}", f"mu = {pair.mu:.10g}",
                  f"Residual: {pair.residual_norm:.3e}", f"Iterations: {pair.iterations}",
                  f"Converged: {pair.converged}"])
    return 0 if pair.converged else 1


def cmd_eig2(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    mesh = cfg.mesh()
    ctx = _context(cfg, Y, cfg.s, mesh)
    solver = cfg.solver()
    banner(cfg, "Second eigenvalue upper bound", [f"Young: {Y.spec_string}", f"s: {cfg.s:g}",
                                                  f"Domain: {cfg.domain}, n = {cfg.n}"])
    first = minimize_first(ctx, default_init(mesh, cfg.init, cfg.seed), solver)
    second = second_upper_bound(ctx, first, solver)
    emit(cfg, {'young': Y.spec_string, 'first': first.to_dict(), 'second': second.to_dict()},
         field_rows(second.field), FIELD_COLUMNS)
    summary(cfg, [f"lambda_1 = {first.lam:.10g} (converged: {first.converged})",
                  f"lambda_2 <= {second.lam:.10g}"])
    return 0 if first.converged else 1


def cmd_sweep(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    mesh = cfg.mesh()
    banner(cfg, "Stability sweep s -> 1", [f"Young: {Y.spec_string}",
                                            f"s values: {list(cfg.s_list)}",
                                            f"Domain: {cfg.domain}, n = {cfg.n}"])
    result = stability_sweep(Y, cfg.s_list, mesh, cfg.solver(), cfg.quadrature(), cfg.tol,
                             init=default_init(mesh, cfg.init, cfg.seed))
    record = result.to_dict()
    record['young'] = Y.spec_string
    relative_gap = result.gap / result.local_limit if result.gap is not None else None
    record['relative_gap'] = relative_gap
    emit(cfg, record, result.rows(), SWEEP_COLUMNS)
    summary(cfg, [f"Extrapolated limit: {result.extrapolated_limit}",
                  f"Local limit: {result.local_limit:.10g}",
                  f"Relative gap: {relative_gap}",
                  f"Failed s values: {sorted(result.failures)}"])
    if result.failures:
        return 1
    return 0 if relative_gap is None or relative_gap <= cfg.gap_tol else 1


def cmd_bbm(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    mesh = cfg.mesh()
    a, b = cfg.domain
    u = interpolate(lambda x: math.sin(math.pi * (x - a) / (b - a)), mesh)
    banner(cfg, "Modular convergence check", [f"Young: {Y.spec_string}",
                                               f"s values: {list(cfg.s_list)}"])
    report = bbm_check(Y, u, cfg.s_list, cfg.quadrature(), cfg.tol)
    emit(cfg, report.to_dict(), report.table(), BBM_COLUMNS)
    summary(cfg, [f"||u'|| in G_bar: {report.target_norm:.10g}",
                  f"Relative gap at largest s: {report.gap:.3e}",
                  f"liminf estimate: {report.limit_estimate:.10g}",
                  f"liminf check: {'passed' if report.liminf_ok else 'FAILED'}"])
    return 0 if report.liminf_ok else 1


def cmd_barg(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    banner(cfg, "Limit Young function", [f"Young: {Y.spec_string}", f"Dimension: {cfg.n_dim}"])
    y_bar = bar_transform(Y, n=cfg.n_dim)
    G, G_bar = Y.G(BAR_GRID), y_bar.G(BAR_GRID)
    rows = [{'t': float(t), 'G': float(g), 'G_bar': float(gb)}
            for t, g, gb in zip(BAR_GRID, G, G_bar)]
    ratio = G_bar / G
    emit(cfg, {'young': Y.spec_string, 'n_dim': cfg.n_dim,
               'ratio_min': float(ratio.min()), 'ratio_max': float(ratio.max()),
               'p_minus': y_bar.exponents.p_minus, 'p_plus': y_bar.exponents.p_plus},
         rows, BAR_COLUMNS)
    summary(cfg, [f"G_bar / G in [{ratio.min():.10g}, {ratio.max():.10g}]"])
    return 0


def cmd_oracle_p2(cfg: ExperimentConfig) -> int:
    Y = cfg.young_function()
    ctx = _context(cfg, Y, cfg.s)
    oracle = p2_matrix_oracle(ctx)
    emit(cfg, {'young': Y.spec_string, 's': cfg.s, 'lambda_1': oracle.lam1,
               'lambda_2': oracle.lam2, 'asymmetry': oracle.asymmetry})
    summary(cfg, [f"lambda_1 = {oracle.lam1:.10g}", f"lambda_2 = {oracle.lam2:.10g}"])
    return 0


# ──────────────────────────────────────────────────────────────────────────────
# Property suite
# ──────────────────────────────────────────────────────────────────────────────

@dataclass
class PropertyResult:
    young: str
    name: str
    passed: bool
    detail: float


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def property_checks(Y: YoungFunction, ctx: FunctionalContext, seed: int,
                    fields_count: int = 5, samples: int = 20000) -> List[PropertyResult]:
    """
    Invariants of the functionals on seeded fields.

    Each check records the worst deviation seen (detail) and whether it is
    within the stated tolerance.
    """
    rng = np.random.default_rng(seed)
    name = Y.spec_string
    results = [PropertyResult(name, 'inequalities', check_inequalities(Y, samples, seed).passed,
                              0.0)]
    ex = Y.exponents
    n = ctx.mesh.n_interior
    worst: Dict[str, float] = {}

    def track(key: str, value: float) -> None:
        worst[key] = max(worst.get(key, 0.0), value)

    fields_drawn = [NodalField(ctx.mesh, rng.standard_normal(n)) for _ in range(fields_count)]
    for u in fields_drawn:
        p_i, p_h = pairing_i(ctx, u), pairing_h(ctx, u)
        unit = luxemburg(ctx.i_cloud.samples(u.with_coefficients(u.coefficients / p_i.tau)),
                         ctx.Y, ctx.tol)
        track('unit_modular', abs(unit.tau - 1.0))
        c = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
        scaled = u.with_coefficients(c * u.coefficients)
        track('homogeneity_I', _relative(i_value(ctx, scaled), c * p_i.tau))
        track('homogeneity_H', _relative(h_value(ctx, scaled), c * p_h.tau))
        track('euler_I', _relative(float(p_i.vector @ u.coefficients) / p_i.denom, p_i.tau))
        track('euler_H', _relative(float(p_h.vector @ u.coefficients) / p_h.denom, p_h.tau))
        for key, denom in (('bounds_D_I', p_i.denom), ('bounds_D_H', p_h.denom)):
            track(key, max(ex.p_minus - denom, denom - ex.p_plus, 0.0))

        v = rng.standard_normal(n)
        eps = 1e-6
        plus = u.with_coefficients(u.coefficients + eps * v)
        minus = u.with_coefficients(u.coefficients - eps * v)
        fd_i = (i_value(ctx, plus) - i_value(ctx, minus)) / (2 * eps)
        fd_h = (h_value(ctx, plus) - h_value(ctx, minus)) / (2 * eps)
        scale = float(np.max(np.abs(v)))
        track('central_difference_I', abs(float(frechet_di(ctx, u) @ v) - fd_i) / scale)
        track('central_difference_H', abs(float(frechet_dh(ctx, u) @ v) - fd_h) / scale)

    for u, w in zip(fields_drawn, fields_drawn[1:]):
        hu, hw = h_value(ctx, u), h_value(ctx, w)
        pairing = float((frechet_dh(ctx, u) - frechet_dh(ctx, w))
                        @ (u.coefficients / hu - w.coefficients / hw))
        track('monotonicity', max(-pairing, 0.0))

    tolerances = {'unit_modular': 1e-10, 'homogeneity_I': 1e-9, 'homogeneity_H': 1e-9,
                  'euler_I': 1e-8, 'euler_H': 1e-8, 'bounds_D_I': 1e-9, 'bounds_D_H': 1e-9,
                  'central_difference_I': 1e-5, 'central_difference_H': 1e-5,
                  'monotonicity': 1e-10}
    for key, tolerance in tolerances.items():
        results.append(PropertyResult(name, key, worst.get(key, 0.0) <= tolerance,
                                      worst.get(key, 0.0)))
    return results


def cmd_props(cfg: ExperimentConfig, families: Optional[List[str]] = None) -> int:
    families = families or ([cfg.young] if cfg.young else list(PROPERTY_FAMILIES))
    mesh = cfg.mesh()
    banner(cfg, "Property suite", [f"Families: {families}", f"s: {cfg.s:g}",
                                   f"Domain: {cfg.domain}, n = {cfg.n}", f"Seed: {cfg.seed}"])
    results: List[PropertyResult] = []
    for spec in families:
        Y = parse_young_spec(spec)
        ctx = _context(cfg, Y, cfg.s, mesh)
        results.extend(property_checks(Y, ctx, cfg.seed, samples=cfg.samples))
    rows = [asdict(r) for r in results]
    emit(cfg, {'checks': rows, 'passed': all(r.passed for r in results)},
         rows, ['young', 'name', 'passed', 'detail'])
    failed = [r for r in results if not r.passed]
    summary(cfg, [f"Checks run: {len(results)}", f"Failed: {len(failed)}"] +
            [f"  {r.young} {r.name}: {r.detail:.3e}" for r in failed])
    return 0 if not failed else 1


COMMANDS: Dict[str, Callable[[ExperimentConfig], int]] = {
    'validate-young': cmd_validate_young,
    'eig': cmd_eig,
    'eig2': cmd_eig2,
    'sweep': cmd_sweep,
    'bbm': cmd_bbm,
    'barg': cmd_barg,
    'oracle-p2': cmd_oracle_p2,
    'props': cmd_props,
}


# ──────────────────────────────────────────────────────────────────────────────
# Entry point
# ──────────────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Eigenvalues of the fractional g-Laplacian in homogeneous (Luxemburg) form',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Examples:
  Check a Young function:
    python orlicz_eig.py validate-young --young powersum:2,1,4,1

  First eigenvalue of the local problem with G(t) = t^2/2:
    python orlicz_eig.py eig --young power:2 --s 1 --n 256

  Sweep s -> 1 and write sweep_p3.json / sweep_p3.csv under outputs/:
    python orlicz_eig.py sweep --young power:3 --out sweep_p3

  Tabulate G_bar as CSV on stdout:
    python orlicz_eig.py barg --young power:3 --csv

Young specs: power:p, powerlog:p, powersum:p,a,q,b (G = a t^p + b t^q).

CSV columns:
  eig, eig2   {','.join(FIELD_COLUMNS)}
  sweep       {','.join(SWEEP_COLUMNS)}
  bbm         {','.join(BBM_COLUMNS)}
  barg        {','.join(BAR_COLUMNS)}
  props       young,name,passed,detail

Environment:
  {THREADS_ENV_VAR}  threads used for quadrature assembly (default 1)
        """
    )
    parser.add_argument('command', choices=sorted(COMMANDS), help='Subcommand to run')
    parser.add_argument('--config', type=Path, default=None,
                        help='Flat key=value file with defaults (flags override it)')
    parser.add_argument('--young', default=None, help='Young function spec (default: power:2)')
    parser.add_argument('--s', type=float, default=None, help='Fractional order in (0, 1]')
    parser.add_argument('--s-list', dest='s_list', default=None,
                        help='Comma-separated increasing orders in (0, 1)')
    parser.add_argument('--n', type=int, default=None,
                        help=f'Number of mesh elements (default: {DEFAULT_MESH_N})')
    parser.add_argument('--domain', default=None, help='Interval endpoints a,b (default: 0,1)')
    parser.add_argument('--tol', type=float, default=None, help='Luxemburg tolerance')
    parser.add_argument('--seed', type=int, default=None, help='Random seed')
    parser.add_argument('--out', default=None,
                        help='Output base path; writes <out>.json and <out>.csv')
    parser.add_argument('--gap-tol', dest='gap_tol', type=float, default=None,
                        help=f'Relative gap accepted by sweep (default: {DEFAULT_GAP_TOL})')
    parser.add_argument('--n-dim', dest='n_dim', type=int, default=None,
                        help='Space dimension of the G_bar transform (default: 1)')
    parser.add_argument('--gauss-order', dest='gauss_order', type=int, default=None)
    parser.add_argument('--diagonal-grading', dest='diagonal_grading', type=int, default=None)
    parser.add_argument('--exterior-tol', dest='exterior_tol', type=float, default=None)
    parser.add_argument('--max-iters', dest='max_iters', type=int, default=None)
    parser.add_argument('--residual-tol', dest='residual_tol', type=float, default=None)
    parser.add_argument('--preconditioner', choices=['picard', 'fixed', 'none'], default=None)
    parser.add_argument('--init', choices=['parabola', 'random'], default=None,
                        help='Initial field of the descent (default: parabola)')
    parser.add_argument('--samples', type=int, default=None,
                        help='Samples per inequality check (default: 100000)')
    output = parser.add_mutually_exclusive_group()
    output.add_argument('--json', dest='fmt', action='store_const', const='json',
                        help='Print the JSON record to stdout (default)')
    output.add_argument('--csv', dest='fmt', action='store_const', const='csv',
                        help='Print the CSV table to stdout')
    parser.add_argument('--verbose', action='store_true',
                        help='Log DEBUG records, including JSON residual diagnostics')
    parser.add_argument('--no-log-file', action='store_true',
                        help='Do not write a timestamped run log under logs/')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(verbose=args.verbose, log_to_file=not args.no_log_file)

    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except OrliczEigError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == '__main__':
    exit(main())

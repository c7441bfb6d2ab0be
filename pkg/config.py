"""
Shared configuration and constants for the orlicz_eig toolkit.

This module centralizes all configurable settings including:
- File paths for logs and experiment outputs
- Sampling grids for Young-function diagnostics and the limit transform
- Quadrature, Luxemburg and descent-solver defaults
- CSV column layouts and the JSON schema version
"""

import logging
import os
from datetime import datetime
from pathlib import Path

# Base paths
ORLICZ_EIG_DIR = Path(__file__).parent

# Log files
LOGS_DIR = ORLICZ_EIG_DIR / "logs"

# Default output directory for --out paths given without a directory
OUTPUT_DIR = ORLICZ_EIG_DIR / "outputs"

# Young-function diagnostics
EXPONENT_GRID_POINTS = 2048
EXPONENT_GRID_RANGE = (1e-6, 1e6)
FLAG_TOLERANCE = 1e-10      # Relative tolerance of sampled structural tests
INVERSE_G_BOUNDS = (1e-12, 1e12)   # Bracket for g^{-1} in the conjugate
INVERSE_G_ITERS = 200

# Limit transform table (G bar)
BAR_TABLE_POINTS = 512
BAR_TABLE_RANGE = (1e-6, 1e6)
BAR_QUAD_TOL = 1e-10
BAR_QUAD_LIMIT = 200        # Subinterval budget of the adaptive quadrature

# Inequality suite sampling
INEQUALITY_T_MAX = 1e4
INEQUALITY_PAIR_RANGE = 10.0
INEQUALITY_MARGIN = 1e-9

# Quadrature defaults
GAUSS_ORDER = 4
DIAGONAL_GRADING = 8
EXTERIOR_TOL = 1e-10
LOG_PANEL_ORDER = 8         # Gauss points per panel of the log-variable rules
LOG_PANEL_WIDTH = 2.0       # Widest panel of the log-variable rules

# Luxemburg root-finding
LUXEMBURG_TOL = 1e-12
LUXEMBURG_MAX_ITERS = 200

# Descent solver defaults
MAX_ITERS = 2000
STEP0 = 1.0
BACKTRACK = 0.5
ARMIJO = 1e-4
RESIDUAL_TOL = 1e-7
MIN_STEP = 1e-12
LOOP_POINTS = 64            # Theta samples of the genus-2 loop
LOOP_SWEEPS = 20            # Alternating sweeps of the loop minimization
INNER_NEWTON_ITERS = 50     # Newton steps of the inner modular solve
INNER_NEWTON_TOL = 1e-12    # Relative gradient tolerance of the inner solve
INVERSE_ACCEPT = 1e-10      # Relative increase of J tolerated on an inverse step

# Experiments
DEFAULT_DOMAIN = (0.0, 1.0)
DEFAULT_MESH_N = 256
DEFAULT_S_LIST = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
DEFAULT_GAP_TOL = 0.05
DEFAULT_SEED = 0
BBM_SLACK = 0.03

SCHEMA_VERSION = "1"

# CSV column layouts
SWEEP_COLUMNS = ['s', 'lambda', 'mu', 'residual', 'iterations']
BBM_COLUMNS = ['s', 'seminorm', 'modular', 'target_norm', 'target_modular']
BAR_COLUMNS = ['t', 'G', 'G_bar']
FIELD_COLUMNS = ['x', 'u']

# Thread cap for quadrature assembly
THREADS_ENV_VAR = "ORLICZ_EIG_THREADS"


def ensure_dirs():
    """Create necessary directories if they don't exist."""
    LOGS_DIR.mkdir(parents=True, exist_ok=True)


def assembly_workers() -> int:
    """
    Number of worker threads allowed for quadrature assembly.

    Returns:
        The value of ORLICZ_EIG_THREADS when it is a positive integer, else 1
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        return 1
    return max(1, workers)


def setup_logging(verbose: bool = False, log_to_file: bool = True) -> Path:
    """
    Configure console logging plus a timestamped run log under logs/.

    Args:
        verbose: If True, log DEBUG records (including JSON diagnostics)
        log_to_file: If False, skip the timestamped file handler

    Returns:
        Path of the run log (may not exist when log_to_file is False)
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_path = LOGS_DIR / f"orlicz_eig_{timestamp}.log"

    root = logging.getLogger()
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    console = logging.StreamHandler()
    console.setLevel(logging.DEBUG if verbose else logging.INFO)
    console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(console)

    if log_to_file:
        ensure_dirs()
        file_handler = logging.FileHandler(log_path, encoding='utf-8')
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(file_handler)

    return log_path

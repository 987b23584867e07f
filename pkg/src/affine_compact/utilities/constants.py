import os
from typing import Literal


# Riccati solver
ODE_TOLERANCE = 1e-10
ODE_METHOD = "DOP853"

# Uniformization oracle: Poisson tail mass left out of the series
UNIFORMIZATION_TRUNCATION = 1e-12

# find_psi_zero
PSI_ZERO_THRESHOLD = 1e-8
# a grid cell must get at least this close before local refinement is attempted
PSI_GRID_THRESHOLD = 0.5
PSI_GRID_POINTS = 41

# Monte Carlo
DEFAULT_CHUNK_SIZE = 10_000
SE_MULTIPLIER = 3.0


def _num_threads() -> int:
    raw = os.environ.get("AFFINE_NUM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


AFFINE_NUM_THREADS = _num_threads()

SUBCOMMANDS = Literal[
    "validate",
    "counters",
    "transform-structure",
    "classify",
    "make",
    "transform",
    "simulate",
    "verify",
    "zeros",
]
TRANSFORM_METHODS = Literal["riccati", "oracle", "closed-form"]
OUTPUT_FORMATS = Literal["json", "csv"]
GENERATORS = Literal["birth-death", "simplex", "layer-example", "product", "k1-example", "drift-coupled"]

# Agreement thresholds of the verification report
RICCATI_ORACLE_TOLERANCE = 1e-7
CLOSED_FORM_TOLERANCE = 1e-8

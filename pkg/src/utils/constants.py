"""
Numerical defaults shared across the lab: tolerances, certification margins,
sampling densities and the JSON schema version.
"""

from enum import Enum

SCHEMA_VERSION = "1.0"

# Algebraic identities (semigroup law, linearity, projection algebra)
DEFAULT_ALGEBRA_TOL = 1e-8
# Membership of a time in the lattice hZ
DEFAULT_GRID_TOL = 1e-9
# Eigenvector condition number above which e^{tA} switches to the Schur path
EIG_CONDITION_LIMIT = 1e8
# Distance of sigma(T(1)) to the unit circle below which T is not hyperbolic
DEFAULT_GAP_TOL = 1e-8
# Smallest |Re sigma(A)| accepted as "off the imaginary axis"
DEFAULT_SPECTRAL_TOL = 1e-10
# Inverse-correction series truncation and tail floor of the decaying proxy
DEFAULT_TAIL_TOL = 1e-12

# Splitting certification
DEFAULT_SPLIT_MARGIN = 0.9
DEFAULT_SPLIT_SAMPLES = 200
DEFAULT_HORIZON_FACTOR = 50.0
DEFAULT_K_ROUNDUP = 1.05

# Experiments
DEFAULT_ORBIT_LENGTH = 100
DEFAULT_SAMPLES_PER_LEG = 8
DEFAULT_R_MIN = 1.0
DEFAULT_DECAY_RATIO = 0.5

# Recurrence
DEFAULT_CHAIN_TIME_SAMPLES = 32
DEFAULT_PROBE_COUNT = 64
DEFAULT_PROBE_TIMES = 256
PROBE_LADDER_FLOOR = -40

# Relative slack used when comparing a recorded jump with a recomputed one
JUMP_CONSISTENCY_TOL = 1e-8


class Subcommand(str, Enum):
    """CLI experiment kinds."""

    SPECTRUM = "spectrum"
    SPLIT = "split"
    SHADOW = "shadow"
    ORACLE = "oracle"
    CHAINREC = "chainrec"
    DEMO = "demo"
    CONJECTURE_PROBE = "conjecture-probe"


class DemoName(str, Enum):
    """Canned end-to-end reproductions."""

    HEAT = "heat"
    TRANSPORT = "transport"
    ROTATION = "rotation"
    GHSHIFT = "ghshift"
    TRIVIAL = "trivial"

"""
Configuration settings for the chainwave string/beam chain toolkit
"""
from pathlib import Path
import os

from dotenv import load_dotenv

load_dotenv()

# Base paths
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = Path(os.getenv("CHAINWAVE_OUTPUT_DIR", str(BASE_DIR / "output")))
CONFIGS_DIR = BASE_DIR / "configs"

# Parallelism
MAX_WORKERS = max(1, int(os.getenv("CHAINWAVE_THREADS", str(os.cpu_count() or 1))))

# Transfer matrices
POLE_THRESHOLD = 1e-8
ASYMPTOTIC_WINDOWS = [(10.0, 20.0), (20.0, 40.0), (40.0, 80.0)]

# Root search
DEFAULT_Z_MIN = 0.5
DEFAULT_Z_MAX = 12.0
DEFAULT_SCAN_POINTS = 20000
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_K_MAX = 1000
ROOT_RESIDUAL_LIMIT = 1e-8
FLAT_CROSSING_RATIO = 0.05
CLASSIFICATION_WINDOW = 0.25

# Eigenmodes
# cosh/sinh edge solves lose e^(z*l) in conditioning; 30 would cross EDGE_CONDITION_LIMIT
EXP_BASIS_THRESHOLD = 12.0
EDGE_CONDITION_LIMIT = 1e12
MODE_RESIDUAL_LIMIT = 1e-8
NULLITY_TOL = 1e-9
QUADRATURE_POINTS = 8
QUADRATURE_PANELS = 32

# Rationality witness
DEFAULT_MAX_DENOMINATOR = 1000
DEFAULT_RATIONAL_TOL = 1e-9

# Finite elements and time integration
MIN_ELEMENTS_PER_EDGE = 4
DEFAULT_MESH_SIZE = 0.01
DEFAULT_T_END = 100.0
DEFAULT_SAMPLE_EVERY = 10
KERNEL_REL_TOL = 1e-12
ZERO_EIGEN_REL_TOL = 1e-9

# Resolvent sweep
TRUST_HORIZON_FRACTION = 0.25
RESOLVENT_TOL = 1e-6

# Decay fit
BOUNDED_GROWTH_LIMIT = 0.05

# Variants
VARIANTS = {
    "P1": {
        "description": "Velocity feedback at every interior node",
        "damped_slopes": False
    },
    "P2": {
        "description": "Velocity feedback at interior nodes plus beam end slope feedback",
        "damped_slopes": True
    },
    "Pc": {
        "description": "Conservative chain, no feedback",
        "damped_slopes": False
    }
}

# Initial data selectors for simulations
INITIAL_DATA = {
    "bump": "sin^2 bump on the first string, projected and graph-norm normalized",
    "zero_mode": "first exact zero mode (requires N >= 2)",
    "first_mode": "first discrete conservative eigenvector, M-normalized"
}

# Verification suite
VERIFY_ORACLE_H = 0.005
VERIFY_ORACLE_COUNT = 10
VERIFY_ORACLE_TOL = 1e-3
VERIFY_FAMILY_RANGE = (20.0, 40.0)
VERIFY_FAMILY_FRACTION = 0.95
VERIFY_FAMILY_SCAN_POINTS = 80000
VERIFY_GAP_ROOTS = 100
VERIFY_KERNEL_TOL = 1e-6
VERIFY_BALANCE_STEPS = 10000
VERIFY_BALANCE_TOL = 1e-8
VERIFY_MODE_COUNT = 20
VERIFY_STRONG_T = 100.0
VERIFY_STRONG_RATIO = 0.5
VERIFY_DECAY_SLOPE = -1.4
VERIFY_DECAY_PER_DECADE = 20
VERIFY_RESOLVENT_SPREAD = 10.0
# midpoint round-off on the discrete kernel grows like cond(K) over the run
VERIFY_ZERO_MODE_TOL = 1e-5

"""Configuration constants for the monotone partition toolkit."""

import os

# Dynamic structure defaults
DEFAULT_KAPPA = 0.5
DEFAULT_DEPTH = 1
DEFAULT_REBUILD_FACTOR = 2.0
MIN_REBUILD_FACTOR = 1.5
LABEL_GAP = 2 ** 32  # spacing between position labels after a relabel

# Seeds
SEED_ENV = "ESPART_SEED"
DEFAULT_SEED = 0

# Partition-count ceilings (multiples of ceil(sqrt(n)))
C_GREEDY = 3
C_DYN_CEILING = 12

# Measured-constant gates
C_MEASURED_CEILING = 8  # exact LIS / dynamic estimate at kappa=0.5, depth 1
RATIO_CEILING = 8       # table score / best chain on adversarial tables
C_COVER = 16            # max_cover <= C_COVER * m^kappa * (log2(m) + 1)
C_EXTRACT = 4           # extract work <= C_EXTRACT * (estimate + m)
LIS_BOUNDED_C1 = 8      # lis_bounded ops <= C1 * n + C2 * k^2
LIS_BOUNDED_C2 = 2

# Slope gates for log-log fits of op counters
SLOPE_PATIENCE = 1.15
SLOPE_BYF = 1.6
SLOPE_DYNAMIC_OP = 1.0  # strict upper bound
SLOPE_DYNAMIC_TOTAL = 1.4
SLOPE_PARTS = 0.55

# Oracles
BRUTE_FORCE_MAX_SEGMENTS = 20
BRUTE_FORCE_MAX_SIDE = 8

# Paths, derived from this file's location
# config.py lives at <repo>/src/config.py
_THIS_DIR = os.path.dirname(os.path.abspath(__file__))
REPO_DIR = os.path.dirname(_THIS_DIR)
LOG_DIR = os.path.join(REPO_DIR, "logs")
LOG_ROTATION_SECONDS = 3600

# Bench
BENCH_HEADER = (
    "algo", "generator", "n", "seed", "parts_count",
    "parts_over_sqrt_n", "ops", "wall_ms", "valid",
)
BENCH_DEFAULT_ALGOS = ("greedy", "byf", "dynamic")
BENCH_DEFAULT_GENS = ("uniform_random", "sorted", "reversed")
BENCH_DEFAULT_NS = (256, 1024, 4096)
BENCH_DEFAULT_SEEDS = (0, 1, 2)

# Exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INVALID = 2

# Rendering
RENDER_CELL_PX = 36
RENDER_MARGIN_PX = 12
FONT_PATH = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono-Bold.ttf"
FONT_PATH_REGULAR = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf"
FONT_MEDIUM = 14
FONT_SMALL = 11

# Colors (RGB tuples for PIL)
COLOR_BG = (255, 255, 255)
COLOR_TEXT = (20, 20, 20)
COLOR_DIM = (170, 170, 170)
COLOR_GRID = (200, 200, 200)
COLOR_PATH = (255, 215, 120)
COLOR_CHAIN = (0, 100, 255)
COLOR_SEGMENT = (0, 200, 0)


def default_seed():
    """Seed for ad-hoc runs: ESPART_SEED if set and numeric, else DEFAULT_SEED."""
    raw = os.environ.get(SEED_ENV, "").strip()
    try:
        return int(raw) if raw else DEFAULT_SEED
    except ValueError:
        return DEFAULT_SEED

import os

from dotenv import load_dotenv

load_dotenv()

# ------------------------------------------------------------
# Runtime mode flags
# ------------------------------------------------------------

# Treat anything other than "true" (case-insensitive) as False
DEBUG_MODE = os.getenv("DEBUG_MODE", "false").lower() == "true"

# ------------------------------------------------------------
# Helpers
# ------------------------------------------------------------

def _env_bool(key: str, default: bool) -> bool:
    raw = os.getenv(key)
    if raw is None:
        return default
    return raw.strip().lower() == "true"

def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or not raw.strip():
        return default
    return int(raw.strip())

def _env_float(key: str, default: float) -> float:
    raw = os.getenv(key)
    if raw is None or not raw.strip():
        return default
    return float(raw.strip())

def env_seed() -> int | None:
    """UNPROP_SEED を呼び出し時点で読む（--seed が無いときのフォールバック）。"""
    raw = os.getenv("UNPROP_SEED")
    if raw is None or not raw.strip():
        return None
    return int(raw.strip(), 0)

# ------------------------------------------------------------
# Augmentation defaults (G, N, J, P)
# ------------------------------------------------------------

DEFAULT_ASPECT_RATIO = _env_float("UNPROP_ASPECT", 1.18)
DEFAULT_TARGET_RECTS = _env_int("UNPROP_RECTS", 5)
DEFAULT_REFINE_STEPS = _env_int("UNPROP_REFINE_STEPS", 7)
DEFAULT_APPLY_PROB = _env_float("UNPROP_PROB", 0.1)
DEFAULT_SEED = 0

SEED_MAX = 2**64 - 1

# Hyperparameter search results. "paper" holds the defaults above.
PRESETS: dict[str, dict[str, float | int]] = {
    "paper": {"aspect_ratio": 1.18, "target_rects": 5, "refine_steps": 7, "apply_prob": 0.1},
    "search-best": {"aspect_ratio": 0.92, "target_rects": 6, "refine_steps": 7, "apply_prob": 0.0007},
    "search-fixed-p": {"aspect_ratio": 0.75, "target_rects": 8, "refine_steps": 6, "apply_prob": 0.1},
}

# ------------------------------------------------------------
# Resampling
# ------------------------------------------------------------

# a < 0 でエッジ付近にオーバーシュート（シャープ化）が出る。-0.5 は Catmull-Rom
CUBIC_SHARPNESS = -0.5

# ------------------------------------------------------------
# Batch / CLI
# ------------------------------------------------------------

MAX_WORKERS = _env_int("UNPROP_WORKERS", 1)
SKIP_ERRORS = _env_bool("UNPROP_SKIP_ERRORS", False)
INPUT_SUFFIXES = (".png", ".ppm", ".pgm")

VIZ_BORDER_COLOR = (255, 0, 0)
VIZ_GAP_PX = 4
VIZ_GAP_FILL = 255

VERIFY_DEFAULT_TRIALS = 1000
VERIFY_MAX_SIDE = 256
VERIFY_MIN_INCONSISTENT_FRACTION = 0.95

# ------------------------------------------------------------
# Benchmark
# ------------------------------------------------------------

BENCH_DEFAULT_SIZE = 512
BENCH_DEFAULT_CHANNELS = 3
BENCH_DEFAULT_REPS = 30
BENCH_MIN_REPS = 30
BENCH_WARMUP_REPS = 10
BENCH_DEFAULT_PROBES = tuple(i / 10 for i in range(11))

# ------------------------------------------------------------
# Logging
# ------------------------------------------------------------

LOG_DIR = os.getenv("UNPROP_LOG_DIR", "logs")
LOG_TO_FILE = _env_bool("UNPROP_LOG_TO_FILE", False)

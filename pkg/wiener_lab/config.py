# wiener_lab/config.py

import os
from typing import Optional

from dotenv import load_dotenv

# Load .env file into environment
load_dotenv()


def _optional_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"❌ {name} must be an integer, got {raw!r}")


# ==================== Reproducibility ====================

DEFAULT_MASTER_SEED = 7


def seed_override() -> Optional[int]:
    """Re-read WIENER_LAB_SEED so a value exported after import still applies."""
    value = _optional_int("WIENER_LAB_SEED")
    if value is not None and not 0 <= value < 2**64:
        raise ValueError("❌ WIENER_LAB_SEED must be a non-negative 64-bit integer")
    return value

# ==================== Execution ====================

DEFAULT_JOBS = int(os.getenv("WIENER_LAB_JOBS", 1))
if DEFAULT_JOBS < 1:
    raise ValueError("❌ WIENER_LAB_JOBS must be at least 1")

LOG_LEVEL = os.getenv("WIENER_LAB_LOG_LEVEL", "INFO").upper()

# ==================== Numerics ====================

PDF_BINS = int(os.getenv("WIENER_LAB_PDF_BINS", 4096))
if PDF_BINS < 8:
    raise ValueError("❌ WIENER_LAB_PDF_BINS must be at least 8")

LLOYD_TOL = float(os.getenv("WIENER_LAB_LLOYD_TOL", 1e-12))
LLOYD_MAX_ITER = int(os.getenv("WIENER_LAB_LLOYD_MAX_ITER", 500))

# Upper limit on N for the finite-N program (O(N) per multiplier evaluation)
MAX_N = int(os.getenv("WIENER_LAB_MAX_N", 100_000))

# ==================== Configuration Class ====================

class Config:
    """Configuration class for easy access to all settings"""

    def __init__(self):
        # Reproducibility (re-read so a late WIENER_LAB_SEED export applies)
        self.SEED_OVERRIDE = seed_override()
        self.DEFAULT_MASTER_SEED = DEFAULT_MASTER_SEED

        # Execution
        self.DEFAULT_JOBS = DEFAULT_JOBS
        self.LOG_LEVEL = LOG_LEVEL

        # Numerics
        self.PDF_BINS = PDF_BINS
        self.LLOYD_TOL = LLOYD_TOL
        self.LLOYD_MAX_ITER = LLOYD_MAX_ITER
        self.MAX_N = MAX_N

    def master_seed(self, cli_seed: int) -> int:
        """WIENER_LAB_SEED wins over the --seed flag."""
        return self.SEED_OVERRIDE if self.SEED_OVERRIDE is not None else cli_seed


def get_config() -> Config:
    """Get configuration instance"""
    return Config()

# ==================== Defaults Export ====================

__all__ = [
    "DEFAULT_MASTER_SEED",
    "seed_override",
    "DEFAULT_JOBS",
    "LOG_LEVEL",
    "PDF_BINS",
    "LLOYD_TOL",
    "LLOYD_MAX_ITER",
    "MAX_N",
    "Config",
    "get_config",
]

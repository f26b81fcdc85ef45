"""
Configuration Management
Single Responsibility: Centralize all configuration
"""
from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """
    Toolkit settings with environment variable support.
    """

    # Memory ceiling for state tables (MB)
    GRIDTALLY_CEILING_MB: int = 4096

    # Strip height ceilings
    MAX_STRIP_HEIGHT_DT: int = 14
    MAX_STRIP_HEIGHT_MIN: int = 8

    # Brute-force oracle
    ORACLE_MAX_CELLS: int = 20
    ORACLE_CHUNK_BITS: int = 16

    # Power iteration
    POWER_TOL: float = 1e-10
    POWER_MAX_ITERS: int = 20000
    POWER_SHIFT: float = 1.0

    # Reports
    REPORT_DIGITS: int = 10

    # Exhaustive glue search
    GLUE_SEARCH_MAX_CELLS: int = 64
    GLUE_SEARCH_MAX_NODES: int = 5_000_000

    # Automaton dump
    DUMP_MAX_STATES: int = 4096

    # Parallelism (None = available cores)
    WORKERS: Optional[int] = None

    # Logging
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True

# Global settings instance
settings = Settings()

# Variant tags accepted on the command line
VARIANT_TAGS = ["D", "T", "M", "MT"]

# Bounds on the growth constants established for the four variants,
# used as consistency bands by selftest and the acceptance checks
KNOWN_GROWTH_BOUNDS = {
    "D": (1.950022198, 1.959201684),
    "T": (1.904220376, 1.923434191),
    "M": (1.315870482, 1.550332154),
    "MT": (1.275805204, 1.524476040),
}

# Limiting ratios quoted for the domination strips
KNOWN_RATIO_LIMITS = {
    "D": 1.954751195,
    "T": 1.915316,
}

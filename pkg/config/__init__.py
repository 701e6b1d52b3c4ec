"""Runtime settings for the solver, read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Final

THREADS_ENV: Final[str] = "HJSD_THREADS"
STENCIL_CACHE_ENV: Final[str] = "HJSD_STENCIL_CACHE_MB"
LOG_LEVEL_ENV: Final[str] = "HJSD_LOG_LEVEL"

DEFAULT_TAU: Final[float] = 1e-6
DEFAULT_STENCIL_CACHE_MB: Final[int] = 512
PENALTY_FACTOR: Final[float] = 10.0
PENALTY_CAP: Final[float] = 1e12
STATIONARY_SPEED: Final[float] = 1e-8


@dataclass(frozen=True)
class Settings:
    """Process-wide knobs that are not part of a problem or a solver run."""

    threads: int
    stencil_cache_mb: int
    log_level: str


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        return default
    return value if value > 0 else default


def load_settings() -> Settings:
    """Build :class:`Settings` from ``HJSD_*`` environment variables."""

    level = (os.getenv(LOG_LEVEL_ENV) or "INFO").strip().upper()
    return Settings(
        threads=_int_from_env(THREADS_ENV, os.cpu_count() or 1),
        stencil_cache_mb=_int_from_env(STENCIL_CACHE_ENV, DEFAULT_STENCIL_CACHE_MB),
        log_level=level or "INFO",
    )


__all__ = [
    "Settings",
    "load_settings",
    "DEFAULT_TAU",
    "DEFAULT_STENCIL_CACHE_MB",
    "PENALTY_FACTOR",
    "PENALTY_CAP",
    "STATIONARY_SPEED",
    "THREADS_ENV",
    "STENCIL_CACHE_ENV",
    "LOG_LEVEL_ENV",
]

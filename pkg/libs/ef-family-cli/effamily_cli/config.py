"""Configuration, constants, and environment settings for the CLI."""

import os
from collections.abc import Mapping
from dataclasses import dataclass
from datetime import UTC, datetime

import dotenv
from rich.console import Console

from effamily.tree import DEFAULT_SEARCH_CAP

dotenv.load_dotenv()

# Color scheme
COLORS = {
    "primary": "#10b981",
    "dim": "#6b7280",
    "pass": "#10b981",
    "fail": "#ef4444",
    "warn": "#fbbf24",
}

# Exit statuses
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

# Human-readable output goes to stderr; stdout carries only JSON or CSV
console = Console(highlight=False, stderr=True)
stdout = Console(highlight=False, soft_wrap=True)


@dataclass(frozen=True)
class Settings:
    """Values read from the environment (and `.env`).

    Attributes:
        search_cap: Default witness search cap (`EF_SEARCH_CAP`).
        log_level: Logging level name (`EF_LOG_LEVEL`).
        created_at: Fixed archive timestamp from `SOURCE_DATE_EPOCH`, or None for now.
    """

    search_cap: int = DEFAULT_SEARCH_CAP
    log_level: str = "WARNING"
    created_at: datetime | None = None


def load_settings(environ: Mapping[str, str] | None = None) -> Settings:
    """Read settings from `environ` (default: the process environment).

    Raises:
        ValueError: If `EF_SEARCH_CAP` or `SOURCE_DATE_EPOCH` is not a positive/non-negative integer.
    """
    env = os.environ if environ is None else environ
    search_cap = DEFAULT_SEARCH_CAP
    if raw := env.get("EF_SEARCH_CAP"):
        search_cap = int(raw)
        if search_cap < 1:
            msg = f"EF_SEARCH_CAP must be a positive integer, got {raw!r}"
            raise ValueError(msg)
    created_at = None
    if raw := env.get("SOURCE_DATE_EPOCH"):
        epoch = int(raw)
        if epoch < 0:
            msg = f"SOURCE_DATE_EPOCH must be non-negative, got {raw!r}"
            raise ValueError(msg)
        created_at = datetime.fromtimestamp(epoch, UTC)
    return Settings(
        search_cap=search_cap,
        log_level=env.get("EF_LOG_LEVEL", "WARNING").upper(),
        created_at=created_at,
    )

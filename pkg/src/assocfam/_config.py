"""Defaults and environment resolution.

Nothing in this module is part of the public API.
"""

from __future__ import annotations

import os

from .exceptions import ConfigError

DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_CASE_TOL = 1e-6
DEFAULT_CLASSIFY_TOL = 1e-7

DEFAULT_GRID_NU = 21
DEFAULT_GRID_NV = 21
DEFAULT_GRID_MARGIN = 0.05

# Relative thresholds for the pointwise extraction checks.
DEGENERATE_TOL = 1e-12
LIGHTLIKE_TOL = 1e-12
ORIENTATION_TOL = 1e-9
UMBILICAL_POINT_TOL = 1e-9
SPACEFORM_TOL = 1e-10

THREADS_ENV = "ASSOCFAM_THREADS"
MAX_DEFAULT_THREADS = 4


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, then ``ASSOCFAM_THREADS``, then the default."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if not raw:
            return min(MAX_DEFAULT_THREADS, os.cpu_count() or 1)
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(
                f"{THREADS_ENV} must be a positive integer, got {raw!r}", value=raw
            ) from None
    if isinstance(threads, bool) or threads < 1:
        raise ConfigError(f"thread count must be a positive integer, got {threads!r}")
    return threads

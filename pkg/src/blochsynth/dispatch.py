"""Regime dispatch: one entry point for the optimal time to any point."""

from __future__ import annotations

import numpy as np

from .geometry import ModelParams
from .large_alpha import optimal_time
from .small_alpha import optimal_to_small


def analytic_time(env: ModelParams, y) -> float:
    """Optimal time from P_N to ``y`` from the closed-form synthesis of the active regime."""
    y = np.asarray(y, dtype=float)
    y = y / np.linalg.norm(y)
    if env.is_large:
        return optimal_time(y, env)
    return optimal_to_small(y, env).total_time

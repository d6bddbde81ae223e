"""Heuristic pesticide and yield-target adjustment."""
from __future__ import annotations

import numpy as np

from .core import ModelParams


def update_pesticide(pesticide, yield_target, realized_yield, params: ModelParams, cap=None):
    """Move the pesticide rate proportionally to the relative yield shortfall.

    Rows with zero realised yield keep their rate. ``cap`` (scalar or array,
    ``None`` for no cap) bounds the result from above.
    """
    pesticide = np.asarray(pesticide, dtype=float)
    y = np.asarray(realized_yield, dtype=float)
    ok = y > 0
    safe_y = np.where(ok, y, 1.0)
    factor = 1.0 + params.gamma * (np.asarray(yield_target) - safe_y) / safe_y
    new = np.where(ok, np.maximum(pesticide * factor, 0.0), pesticide)
    if cap is not None:
        new = np.minimum(new, cap)
    return new


def update_yield_target(yield_target, price: float, prev_price: float, params: ModelParams):
    """Scale the target by the relative price change, kept within ``(0, y_max]``."""
    target = np.asarray(yield_target, dtype=float) * (1.0 + params.lambda_ * (price - prev_price) / price)
    # a non-positive target would need lambda * |dp/p| >= 1; keep a sliver above zero
    return np.clip(target, 1e-9 * params.y_max, params.y_max)

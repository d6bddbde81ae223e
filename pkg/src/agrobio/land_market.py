"""Centralised yearly land rental market.

Farmers whose return falls short of the opportunity cost release land,
those above it bid for more, and all bids are served pro rata from the
pooled supply (last year's leftover plus this year's releases).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EXIT_THRESHOLD_HA, ModelParams


class LandMarketError(RuntimeError):
    """Land bookkeeping broke an invariant (negative leftover)."""


def compute_release(land, roi, params: ModelParams):
    """Hectares given up by farmers with ``roi < r_ref``; zero for everyone else."""
    land = np.asarray(land, dtype=float)
    roi = np.asarray(roi, dtype=float)
    losing = roi < params.r_ref
    gap = np.where(losing, params.r_ref - roi, 1.0)
    frac = params.beta / (1.0 + params.r_ref / gap)
    return np.where(losing, frac * land, 0.0)


def compute_demand(land, roi, params: ModelParams):
    """Prospective hectares sought by farmers with ``roi > r_ref``."""
    land = np.asarray(land, dtype=float)
    roi = np.asarray(roi, dtype=float)
    winning = roi > params.r_ref
    gap = np.where(winning, roi - params.r_ref, 1.0)
    frac = params.beta / (1.0 + params.r_ref / gap)
    return np.where(winning, frac * land, 0.0)


def rationing_factor(available: float, demanded: float, strict: bool = False) -> float:
    if demanded <= 0:
        return 0.0
    if strict:
        return min(1.0, demanded / available) if available > 0 else 1.0
    return min(1.0, available / demanded)


@dataclass
class Settlement:
    released: np.ndarray
    acquired: np.ndarray
    exited: np.ndarray
    available: float
    demanded: float
    phi: float
    leftover: float


def settle_market(pop, leftover: float, params: ModelParams) -> Settlement:
    """Apply releases, rationed acquisitions and exits to ``pop`` in place.

    Returns the settlement record; ``leftover`` in it is the new pool.
    """
    if leftover < 0:
        raise LandMarketError(f"negative leftover land on entry: {leftover}")
    active = pop.active
    land = np.where(active, pop.land, 0.0)
    roi = pop.roi
    released = np.where(active, compute_release(land, roi, params), 0.0)
    wanted = np.where(active, compute_demand(land, roi, params), 0.0)

    total_released = float(released.sum())
    available = leftover + total_released
    demanded = float(wanted.sum())
    phi = rationing_factor(available, demanded, params.strict_rationing)
    acquired = phi * wanted
    total_acquired = float(acquired.sum())

    pop.land[:] = land - released + acquired
    new_leftover = leftover + total_released - total_acquired
    tol = 1e-9 * max(params.l0_total, 1.0)
    if new_leftover < 0:
        if new_leftover < -tol:
            raise LandMarketError(f"leftover land went negative ({new_leftover:.6g} ha)")
        new_leftover = 0.0

    exited = active & (pop.land < EXIT_THRESHOLD_HA)
    if exited.any():
        new_leftover += float(pop.land[exited].sum())
        pop.land[exited] = 0.0
        pop.active[exited] = False
    return Settlement(released, acquired, exited, available, demanded, phi, new_leftover)

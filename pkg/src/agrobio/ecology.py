"""Biodiversity, carrying capacity and pest-exposure feedback."""
from __future__ import annotations

import dataclasses

import numpy as np

from .core import EcologyState, ModelParams, weighted_aggregate

PEST_CEILING = 0.999


def weighted_pesticide_mean(land, pesticide, efficiency, active, k: float = 0.0) -> float:
    """Land-weighted mean of ``P * e**k`` over active farmers.

    Raises ``ZeroDivisionError`` if no active farmer holds land.
    """
    active = np.asarray(active, dtype=bool)
    return weighted_aggregate(np.asarray(land)[active], np.asarray(pesticide)[active],
                              np.asarray(efficiency)[active], k)


def update_carrying(eco: EcologyState, lbar_new: float, pagg_new: float, params: ModelParams) -> float:
    if not (lbar_new > 0 and pagg_new > 0):
        raise ValueError("mean farm size and pesticide aggregate must be positive")
    return params.mu * eco.lbar0 / lbar_new + (1.0 - params.mu) * eco.pagg0 / pagg_new


def update_biodiversity(eco: EcologyState, k_next: float, params: ModelParams) -> float:
    eps = eco.eps
    return max(eps + params.r_eps * (1.0 - eps / k_next) * eps, params.eps_floor)


def update_pest(eps_next: float, eco: EcologyState, params: ModelParams) -> float:
    pest = params.pi0 * (eco.eps0 / max(eps_next, params.eps_floor)) ** params.a
    return float(min(max(pest, np.finfo(float).tiny), PEST_CEILING))


def advance(eco: EcologyState, lbar_new: float, pagg_new: float, params: ModelParams) -> EcologyState:
    """Carrying capacity, then biodiversity, then pest exposure for the next year."""
    k_next = update_carrying(eco, lbar_new, pagg_new, params)
    eps_next = update_biodiversity(eco, k_next, params)
    pest_next = update_pest(eps_next, eco, params)
    return dataclasses.replace(eco, eps=eps_next, pest=pest_next, carrying=k_next)

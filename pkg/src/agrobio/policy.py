"""Policy scenarios: pesticide-reduction ramp, flat coupon and subsidy reallocation."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

from .core import ConfigurationError, ModelParams

KINDS = ("baseline", "pesticide_reduction", "flat_subsidy", "combined")
RAMP_MODES = ("prose", "footnote")


@dataclass(frozen=True)
class ScenarioConfig:
    """Which policy is active and how it is parameterised.

    Policies switch on in ``ramp_start_year``; the pesticide cap reaches its
    final level in ``ramp_end_year``. ``variant_a``/``variant_k`` and the two
    overrides, when set, replace the corresponding model parameters.
    """

    kind: str = "baseline"
    ramp_start_year: int = 2022
    ramp_end_year: int = 2030
    reduction_fraction: float = 0.5
    flat_amount: float = 200.0
    theta: float = 0.003
    ramp_mode: str = "prose"
    variant_a: float | None = None
    variant_k: float | None = None
    mu_override: float | None = None
    eta_override: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        if self.ramp_mode not in RAMP_MODES:
            raise ConfigurationError(f"unknown ramp mode {self.ramp_mode!r}")
        if not self.ramp_start_year < self.ramp_end_year:
            raise ConfigurationError("ramp_start_year must precede ramp_end_year")
        if not 0.0 < self.reduction_fraction <= 1.0:
            raise ConfigurationError("reduction_fraction must lie in (0, 1]")
        if not 0.0 <= self.theta < 1.0:
            raise ConfigurationError("theta must lie in [0, 1)")
        if self.flat_amount < 0:
            raise ConfigurationError("flat_amount must be non-negative")

    @property
    def reduces_pesticide(self) -> bool:
        return self.kind in ("pesticide_reduction", "combined")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def apply(self, params: ModelParams) -> ModelParams:
        """Model parameters with this scenario's variant overrides applied."""
        changes = {}
        if self.variant_a is not None:
            changes["a"] = self.variant_a
        if self.variant_k is not None:
            changes["k"] = self.variant_k
        if self.mu_override is not None:
            changes["mu"] = self.mu_override
        if self.eta_override is not None:
            changes["eta"] = self.eta_override
        return params.replace(**changes) if changes else params


def ramp_progress(scenario: ScenarioConfig, year: float) -> float:
    """Fraction of the ramp completed for pesticide applied in ``year``.

    The rate recorded in ``ramp_start_year - 1`` is the anchor, so the first
    ramp year already carries one step and ``ramp_end_year`` is complete.
    """
    anchor = scenario.ramp_start_year - 1
    span = scenario.ramp_end_year - anchor
    return min(max((year - anchor) / span, 0.0), 1.0)


def pesticide_cap(scenario: ScenarioConfig, p_anchor, year: float):
    """Upper bound on pesticide use in ``year``, or ``None`` when no cap applies.

    ``p_anchor`` is the farmer's rate in the year before the ramp starts.
    In ``"footnote"`` mode the printed ramp factor is used verbatim, which
    rises from 1/9 of the anchor to the full anchor instead of descending.
    """
    if not scenario.reduces_pesticide or year < scenario.ramp_start_year:
        return None
    progress = ramp_progress(scenario, year)
    if scenario.ramp_mode == "footnote":
        return p_anchor * progress
    return p_anchor * (1.0 - scenario.reduction_fraction * progress)


class SubsidyTerms(NamedTuple):
    per_hectare_pool: float
    flat_pot: float  # split equally among active farmers
    coupon: float  # paid in full to every active farmer

    def flat_per_farmer(self, n_active: int) -> float:
        return self.coupon + (self.flat_pot / n_active if self.flat_pot else 0.0)

    @property
    def total_outlay_excl_coupon(self) -> float:
        return self.per_hectare_pool + self.flat_pot


def subsidy_terms(scenario: ScenarioConfig, params: ModelParams, year: float | None = None) -> SubsidyTerms:
    """Per-hectare pool and per-farmer payments for ``year`` (policy always on if ``year`` is None)."""
    started = year is None or year >= scenario.ramp_start_year
    if started and scenario.kind == "flat_subsidy":
        return SubsidyTerms(params.s_total, 0.0, scenario.flat_amount)
    if started and scenario.kind == "combined":
        return SubsidyTerms((1.0 - scenario.theta) * params.s_total, scenario.theta * params.s_total, 0.0)
    return SubsidyTerms(params.s_total, 0.0, 0.0)

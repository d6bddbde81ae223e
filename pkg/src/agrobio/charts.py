"""SVG charts of scenario trajectories and reallocation sweeps."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# legend order and line styles used for the four policy scenarios
SCENARIO_STYLES = {
    "baseline": dict(color="tab:blue", linestyle="-", label="baseline"),
    "pesticide_reduction": dict(color="tab:orange", linestyle="--", label="pesticide reduction"),
    "flat_subsidy": dict(color="tab:green", linestyle="-.", label="flat subsidy"),
    "combined": dict(color="tab:brown", linestyle=(0, (6, 2, 1, 2, 1, 2)), label="combined"),
}

# (title, frame field); production is drawn against demand separately
SCENARIO_PANELS = (
    ("biodiversity index", "eps"),
    ("market price", "price"),
    ("mean farm size (ha)", "mean_farm_size"),
    ("mean pesticide (kg/ha)", "weighted_pesticide_mean"),
    ("production vs demand", "total_production"),
    ("active farmers", "n_active"),
    ("mean ROI", "mean_roi"),
    ("mean efficiency", "mean_efficiency"),
    ("mean yield (t/ha)", "mean_yield"),
)

SWEEP_PANELS = (
    ("subsidy per farmer", "subsidy_per_farmer"),
    ("subsidy per hectare", "subsidy_per_hectare"),
    ("biodiversity index", "eps"),
    ("market price", "price"),
    ("mean farm size (ha)", "mean_farm_size"),
    ("active farmers", "n_active"),
)


def _save(fig, path) -> Path:
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "agrobio", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def _style(name: str, index: int) -> dict:
    if name in SCENARIO_STYLES:
        return dict(SCENARIO_STYLES[name])
    return dict(color=f"C{index % 10}", linestyle="-", label=name)


def scenario_figure(series: Mapping[str, Mapping[str, np.ndarray]],
                    calibration_window: tuple[int, int] | None = (1990, 2021)):
    """Nine-panel figure, one curve per scenario, in the order given.

    Every scenario must cover the same years.
    """
    if not series:
        raise ValueError("no series to plot")
    names = list(series)
    years = np.asarray(series[names[0]]["year"])
    for name in names[1:]:
        other = np.asarray(series[name]["year"])
        if other.shape != years.shape or np.any(other != years):
            raise ValueError(f"scenario {name!r} covers different years than {names[0]!r}")
    fig, axes = plt.subplots(3, 3, figsize=(13, 10), sharex=True)
    for ax, (title, field) in zip(axes.flat, SCENARIO_PANELS):
        if calibration_window is not None:
            ax.axvspan(*calibration_window, color="0.9", zorder=0)
        for i, name in enumerate(names):
            ax.plot(years, series[name][field], **_style(name, i))
        if field == "total_production":
            ax.plot(years, series[names[0]]["demand"], color="black", linewidth=0.8, label="demand")
        ax.set_title(title, fontsize=10)
    for ax in axes[-1]:
        ax.set_xlabel("year")
    handles, labels = axes.flat[4].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=len(labels), frameon=False)
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    return fig


def render_scenarios(series: Mapping[str, Mapping[str, np.ndarray]], path,
                     calibration_window: tuple[int, int] | None = (1990, 2021)) -> Path:
    return _save(scenario_figure(series, calibration_window), path)


def sweep_figure(rows: Sequence):
    """Six-panel figure of end-year outcomes against the reallocation percentage.

    ``rows`` are sweep rows or mappings with the same keys.
    """
    if not rows:
        raise ValueError("empty sweep")
    get = (lambda r, k: r[k]) if isinstance(rows[0], Mapping) else getattr
    order = np.argsort([get(r, "theta") for r in rows], kind="stable")
    pct = np.array([get(rows[i], "theta") for i in order]) * 100.0
    fig, axes = plt.subplots(2, 3, figsize=(12, 7), sharex=True)
    for ax, (title, field) in zip(axes.flat, SWEEP_PANELS):
        ax.plot(pct, [get(rows[i], field) for i in order], marker="o", color="tab:brown")
        ax.set_title(title, fontsize=10)
    for ax in axes[-1]:
        ax.set_xlabel("subsidies reallocated (%)")
    fig.tight_layout()
    return fig


def render_sweep(rows: Sequence, path) -> Path:
    return _save(sweep_figure(rows), path)

"""Writing and reading simulation outputs.

Layout of an output directory::

    <scenario>_mean.csv          Monte Carlo mean, one row per year
    <scenario>_stderr.csv        standard error of the mean
    <scenario>_seed<seed>.csv    one file per replica
    theta_sweep.csv              end-year outcomes per reallocation fraction
    manifest.json                config echo, seeds, code version, file hashes

Floats are written with ``repr`` so a reread is exact, and nothing depends
on the clock, so identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .engine import FRAME_FIELDS, ScenarioResult, SweepRow, frames_to_series

MANIFEST = "manifest.json"
SWEEP_FILE = "theta_sweep.csv"


class ResultsError(OSError):
    """An output directory cannot be written or read back."""


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _table_csv(columns: Sequence[str], rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode()


def series_csv(years: np.ndarray, series: Mapping[str, np.ndarray]) -> bytes:
    cols = [name for name in FRAME_FIELDS if name != "year"]
    rows = ([int(y)] + [series[c][i] for c in cols] for i, y in enumerate(years))
    return _table_csv(["year", *cols], rows)


def _write(path: Path, payload: bytes, hashes: dict) -> None:
    try:
        path.write_bytes(payload)
    except OSError as exc:
        raise ResultsError(f"{path}: cannot write ({exc.strerror or exc})") from None
    hashes[path.name] = hashlib.sha256(payload).hexdigest()


def write_results(results: Mapping[str, ScenarioResult], out_dir, config=None,
                  sweep: Sequence[SweepRow] | None = None) -> Path:
    """Write every scenario's replica and mean tables plus a manifest; returns the manifest path."""
    if not results and not sweep:
        raise ValueError("nothing to write")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResultsError(f"{out}: cannot create directory ({exc.strerror or exc})") from None
    hashes: dict[str, str] = {}
    scenarios = {}
    for name, res in results.items():
        if not res.runs or not any(r.frames for r in res.runs):
            raise ValueError(f"scenario {name!r} has no frames")
        _write(out / f"{name}_mean.csv", series_csv(res.years, res.mean), hashes)
        _write(out / f"{name}_stderr.csv", series_csv(res.years, res.stderr), hashes)
        for r in res.runs:
            s = frames_to_series(r.frames)
            _write(out / f"{name}_seed{r.seed}.csv", series_csv(s["year"].astype(int), s), hashes)
        scenarios[name] = {
            "scenario": dataclasses.asdict(res.scenario),
            "seeds": res.seeds,
            "collapsed_seeds": [r.seed for r in res.runs if r.collapsed],
            "first_year": int(res.years[0]),
            "last_year": int(res.years[-1]),
        }
    if sweep:
        cols = [f.name for f in dataclasses.fields(SweepRow)]
        _write(out / SWEEP_FILE, _table_csv(cols, (dataclasses.astuple(r) for r in sweep)), hashes)
    manifest = {
        "code_version": __version__,
        "config": config.to_dict() if config is not None else None,
        "scenarios": scenarios,
        "files": dict(sorted(hashes.items())),
    }
    text = json.dumps(manifest, indent=2, sort_keys=True, allow_nan=True) + "\n"
    path = out / MANIFEST
    _write(path, text.encode(), {})
    return path


def read_table(path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(c) for c in row] for row in reader]
    except (OSError, StopIteration, ValueError) as exc:
        raise ResultsError(f"{path}: cannot read table ({exc})") from None
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def read_results(out_dir) -> tuple[dict[str, dict[str, np.ndarray]], list[dict[str, float]] | None]:
    """Mean series per scenario (in manifest order) and the sweep table, if any."""
    out = Path(out_dir)
    try:
        manifest = json.loads((out / MANIFEST).read_text())
    except (OSError, ValueError) as exc:
        raise ResultsError(f"{out / MANIFEST}: cannot read manifest ({exc})") from None
    means = {name: read_table(out / f"{name}_mean.csv") for name in manifest["scenarios"]}
    sweep = None
    if SWEEP_FILE in manifest["files"]:
        table = read_table(out / SWEEP_FILE)
        sweep = [{k: float(v[i]) for k, v in table.items()} for i in range(len(table["theta"]))]
    return means, sweep


def write_table(path, columns: Sequence[str], rows) -> Path:
    """Write a plain table (e.g. calibration scores) with the same number formatting."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResultsError(f"{path.parent}: cannot create directory ({exc.strerror or exc})") from None
    _write(path, _table_csv(columns, rows), {})
    return path

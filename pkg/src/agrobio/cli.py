"""Command-line front end: ``agrobio <command> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import calibration, charts, results
from .config import CONFIG_ENV, RunConfig, load_config
from .core import ConfigurationError
from .engine import run_scenario, theta_sweep
from .policy import KINDS
from .reference import ReferenceDataError, default_reference_dir, load_reference_data

log = logging.getLogger("agrobio")


def default_config_path() -> Path:
    return Path(str(resources.files("agrobio") / "data" / "default_config.yaml"))


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"run configuration (YAML); defaults to ${CONFIG_ENV} or built-ins")
    common.add_argument("--seed", type=int, help="seed of the first replica")
    common.add_argument("--replicas", type=int, help="number of Monte Carlo replicas")
    common.add_argument("--out", help="output directory")
    common.add_argument("--scenario", choices=KINDS, help="policy scenario")
    common.add_argument("--desk-scale", action="store_true", help="run at 1/10 of the national size")
    common.add_argument("--jobs", type=int, help="worker processes for replicas")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="agrobio", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("run", parents=[common], help="simulate one scenario")
    sub.add_parser("compare", parents=[common], help="simulate all four scenarios with shared seeds")
    sweep = sub.add_parser("sweep", parents=[common], help="combined policy over a reallocation grid")
    sweep.add_argument("--grid", help="comma-separated reallocation fractions, e.g. 0,0.001,0.003")
    cal = sub.add_parser("calibrate", parents=[common], help="Sobol search over the calibrated parameters")
    cal.add_argument("--points", type=int, help="number of Sobol points")
    sub.add_parser("sensitivity", parents=[common], help="one-at-a-time +-50%% sensitivity in 2020")
    sub.add_parser("plot", parents=[common], help="charts from a results directory (--out)")
    sub.add_parser("validate-config", parents=[common], help="parse and check a configuration file")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    engine = cfg.engine
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.replicas is not None:
        changes["replicas"] = args.replicas
    if args.desk_scale:
        changes["desk_scale"] = True
    if args.jobs is not None:
        changes["n_jobs"] = args.jobs
    if getattr(args, "grid", None):
        try:
            changes["theta_grid"] = tuple(float(x) for x in args.grid.split(","))
        except ValueError:
            raise ConfigurationError(f"--grid: not a list of numbers: {args.grid!r}") from None
    blocks = {"engine": dataclasses.replace(engine, **changes)} if changes else {}
    if args.scenario is not None:
        blocks["scenario"] = cfg.scenario.replace(kind=args.scenario)
    if args.out is not None:
        blocks["paths"] = dataclasses.replace(cfg.paths, output_dir=args.out)
    if getattr(args, "points", None) is not None:
        blocks["calibration"] = dataclasses.replace(cfg.calibration, sobol_points=args.points)
    return cfg.replace(**blocks) if blocks else cfg


def _reference(cfg: RunConfig):
    directory = cfg.paths.reference_dir or default_reference_dir()
    return load_reference_data(directory, *cfg.calibration.period)


def cmd_run(cfg: RunConfig, out: Path) -> None:
    res = run_scenario(cfg.params(), cfg.scenario, cfg.engine.seeds, n_jobs=cfg.engine.n_jobs)
    results.write_results({cfg.scenario.kind: res}, out, cfg)
    charts.render_scenarios({cfg.scenario.kind: res.mean}, out / "scenarios.svg")
    eps = res.mean["eps"]
    print(f"{cfg.scenario.kind}: eps {res.years[-1]} = {eps[-1]:.4f}; results in {out}")


def cmd_compare(cfg: RunConfig, out: Path) -> None:
    runs = {}
    for kind in KINDS:
        runs[kind] = run_scenario(cfg.params(), cfg.scenario.replace(kind=kind), cfg.engine.seeds,
                                  n_jobs=cfg.engine.n_jobs)
        print(f"{kind}: eps {runs[kind].years[-1]} = {runs[kind].mean['eps'][-1]:.4f}")
    results.write_results(runs, out, cfg)
    charts.render_scenarios({k: r.mean for k, r in runs.items()}, out / "scenarios.svg")


def cmd_sweep(cfg: RunConfig, out: Path) -> None:
    rows = theta_sweep(cfg.params(), cfg.engine.theta_grid, cfg.engine.seeds, cfg.scenario,
                       n_jobs=cfg.engine.n_jobs)
    results.write_results({}, out, cfg, sweep=rows)
    charts.render_sweep(rows, out / "theta_sweep.svg")
    for r in rows:
        print(f"theta={r.theta:g}: eps={r.eps:.4f} farmers={r.n_active:.0f} "
              f"per_farmer={r.subsidy_per_farmer:.1f}")


def cmd_calibrate(cfg: RunConfig, out: Path) -> None:
    reference, histogram = _reference(cfg)
    result = calibration.calibrate(cfg.calibration, reference, cfg.params(), histogram,
                                   n_jobs=cfg.engine.n_jobs)
    table = result.table()
    cols = list(table[0])
    results.write_table(out / "calibration.csv", cols, ([row[c] for c in cols] for row in table))
    best = result.best
    params = ", ".join(f"{k}={v:.4g}" for k, v in best.point.items())
    print(f"best: {params}; score={best.score:.4f} R2={best.r2:.3f} adjusted R2={best.adjusted_r2:.3f}")


def cmd_sensitivity(cfg: RunConfig, out: Path) -> None:
    params = cfg.params()
    point = {name: getattr(params, field) for name, field in calibration.PARAMETERS.items()}
    table = calibration.sensitivity(point, params, cfg.scenario.replace(kind="baseline"), cfg.engine.seeds)
    cols = ["parameter", "factor", "eps", "pesticide", "farm_size"]
    rows = [[r.parameter, r.factor, r.eps, r.pesticide, r.farm_size] for r in table.rows]
    results.write_table(out / "sensitivity.csv", cols, rows)
    for name in table.parameters():
        spreads = " ".join(f"{o}={table.spread(name, o):.4f}" for o in calibration.SENSITIVITY_OUTPUTS)
        print(f"{name}: {spreads}")


def cmd_plot(cfg: RunConfig, out: Path) -> None:
    means, sweep = results.read_results(out)
    if means:
        charts.render_scenarios(means, out / "scenarios.svg")
    if sweep:
        charts.render_sweep(sweep, out / "theta_sweep.svg")
    print(f"charts written to {out}")


def cmd_validate(args) -> None:
    path = args.config
    if path is None:
        path = os.environ.get(CONFIG_ENV) or default_config_path()
    load_config(path)
    print(f"{path}: ok")


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
    "sensitivity": cmd_sensitivity,
    "plot": cmd_plot,
}


def cli_main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate-config":
            cmd_validate(args)
            return 0
        cfg = _config(args)
        COMMANDS[args.command](cfg, Path(cfg.paths.output_dir))
    except (ConfigurationError, ReferenceDataError, results.ResultsError, ValueError, OSError) as exc:
        print(f"agrobio {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

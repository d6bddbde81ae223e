import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agrobio.cli import default_config_path
from agrobio.config import CONFIG_ENV, EngineConfig, RunConfig, load_config, save_config
from agrobio.core import ConfigurationError, ModelParams
from agrobio.policy import KINDS


def test_defaults():
    cfg = RunConfig()
    assert cfg.model == ModelParams()
    assert cfg.engine.seeds == list(range(10))
    assert cfg.params() is cfg.model
    assert cfg.replace(engine=EngineConfig(desk_scale=True)).params().n0 == 30_000


def test_shipped_default_file_matches_builtins():
    assert load_config(default_config_path()) == RunConfig()


def test_round_trip_default():
    cfg = RunConfig()
    assert RunConfig.from_yaml(cfg.to_yaml()) == cfg


@given(
    mu=st.floats(0, 1), gamma=st.floats(0, 5), seed=st.integers(0, 2**63),
    kind=st.sampled_from(KINDS), theta=st.floats(0, 0.5), replicas=st.integers(1, 50),
    grid=st.lists(st.floats(0, 0.9), min_size=1, max_size=5),
)
def test_round_trip(mu, gamma, seed, kind, theta, replicas, grid):
    cfg = RunConfig().replace(
        model=ModelParams(mu=mu, gamma=gamma),
        scenario=RunConfig().scenario.replace(kind=kind, theta=theta),
        engine=EngineConfig(seed=seed, replicas=replicas, theta_grid=tuple(grid)),
    )
    once = RunConfig.from_yaml(cfg.to_yaml())
    assert once == cfg
    assert RunConfig.from_yaml(once.to_yaml()) == once


@pytest.mark.parametrize("text", [
    "extra: {}", "model: {n_farms: 3}", "engine: {replicas: 2, colour: red}", "paths: {outdir: x}",
])
def test_unknown_keys_rejected(text):
    with pytest.raises(ConfigurationError, match="unknown"):
        RunConfig.from_yaml(text)


@pytest.mark.parametrize("text", ["model: {mu: 3}", "engine: {replicas: 0}", "scenario: {kind: other}",
                                  "model: [1, 2]", "calibration: {sobol_points: 0}", "model: {mu: x}", ": :"])
def test_invalid_values_rejected(text):
    with pytest.raises(ConfigurationError):
        RunConfig.from_yaml(text)


def test_partial_blocks_and_exponent_strings():
    cfg = RunConfig.from_yaml("model:\n  l0_total: 1e6\n  n0: 30000\nscenario:\n  kind: combined\n")
    assert cfg.model.l0_total == 1e6 and cfg.model.n0 == 30000
    assert cfg.scenario.kind == "combined" and cfg.scenario.theta == 0.003


def test_calibration_ranges_round_trip():
    cfg = RunConfig.from_yaml("calibration:\n  ranges: {beta: [0.3, 0.6]}\n  period: [1995, 2015]\n")
    assert dict(cfg.calibration.ranges) == {"beta": (0.3, 0.6)}
    assert cfg.calibration.period == (1995, 2015)
    assert RunConfig.from_yaml(cfg.to_yaml()) == cfg


def test_env_var_names_default_file(tmp_path, monkeypatch):
    path = tmp_path / "c.yaml"
    save_config(RunConfig().replace(engine=EngineConfig(replicas=3)), path)
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert load_config().engine.replicas == 3
    monkeypatch.delenv(CONFIG_ENV)
    assert load_config() == RunConfig()
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.yaml")

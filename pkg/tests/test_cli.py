import pytest

from agrobio.cli import cli_main

TINY = """\
model:
  n0: 2000
  l0_total: 66666.0
  s_total: 33333333.0
  end_year: 2030
engine:
  replicas: 2
calibration:
  sobol_points: 2
  replicas_per_point: 1
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY)
    return str(path)


def test_validate_shipped_default(capsys, monkeypatch):
    monkeypatch.delenv("AGROBIO_CONFIG", raising=False)
    assert cli_main(["validate-config"]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: {mu: 5}\n")
    assert cli_main(["validate-config", "--config", str(bad)]) == 1
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "mu" in err


def test_usage_errors(capsys):
    assert cli_main(["frobnicate"]) != 0
    assert cli_main(["run", "--bogus"]) != 0
    assert cli_main([]) != 0
    assert "usage" in capsys.readouterr().err


def test_run_twice_is_identical(tmp_path, tiny_config):
    outs = []
    for _ in range(2):
        out = tmp_path / "out"
        assert cli_main(["run", "--config", tiny_config, "--scenario", "baseline", "--seed", "42", "--out", str(out)]) == 0
        outs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
    assert outs[0] == outs[1]
    assert "baseline_seed42.csv" in outs[0] and "baseline_seed43.csv" in outs[0]
    assert len(outs[0]["baseline_mean.csv"].splitlines()) == 1 + 41


def test_compare_and_plot(tmp_path, tiny_config):
    out = tmp_path / "cmp"
    assert cli_main(["compare", "--config", tiny_config, "--replicas", "1", "--out", str(out)]) == 0
    for kind in ("baseline", "pesticide_reduction", "flat_subsidy", "combined"):
        assert (out / f"{kind}_mean.csv").exists()
    (out / "scenarios.svg").unlink()
    assert cli_main(["plot", "--out", str(out)]) == 0
    assert (out / "scenarios.svg").exists()


def test_sweep_grid_rows(tmp_path, tiny_config):
    out = tmp_path / "sw"
    assert cli_main(["sweep", "--config", tiny_config, "--replicas", "1", "--grid", "0,0.001,0.003,0.01",
                     "--out", str(out)]) == 0
    lines = (out / "theta_sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + 4
    assert (out / "theta_sweep.svg").exists()
    assert cli_main(["sweep", "--config", tiny_config, "--grid", "0,x", "--out", str(out)]) == 1


def test_calibrate_and_sensitivity(tmp_path, tiny_config):
    out = tmp_path / "cal"
    assert cli_main(["calibrate", "--config", tiny_config, "--out", str(out)]) == 0
    assert len((out / "calibration.csv").read_text().splitlines()) == 3
    assert cli_main(["sensitivity", "--config", tiny_config, "--replicas", "1", "--out", str(out)]) == 0
    assert len((out / "sensitivity.csv").read_text().splitlines()) == 1 + 14


def test_plot_missing_results(tmp_path):
    assert cli_main(["plot", "--out", str(tmp_path / "nothing")]) == 1


def test_desk_scale_flag(tmp_path, capsys):
    cfg = tmp_path / "short.yaml"
    cfg.write_text("model: {end_year: 1992}\nengine: {replicas: 1}\n")
    assert cli_main(["run", "--config", str(cfg), "--desk-scale", "--out", str(tmp_path / "d")]) == 0
    text = (tmp_path / "d" / "baseline_mean.csv").read_text().splitlines()
    n_active = float(text[1].split(",")[7])
    assert n_active == 30_000

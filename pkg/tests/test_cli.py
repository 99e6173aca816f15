"""Tests for the command-line front end and the run configuration."""

import csv
import importlib
import json
import math
import re
from pathlib import Path

import pytest

from src.cli import dispatch, dump_run_config, load_run_config
from src.cli.main import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_USAGE
from src.cli.run_config import RunConfig
from src.exceptions import ConfigError, DivergenceError
from src.sweep import SweepRow, optimization

cli_main = importlib.import_module("src.cli.main")
heatmap_module = importlib.import_module("src.sweep.heatmap")

SMALL_RUN = """\
[medium]
optical_depth = 10

[schedule]
delta0 = 10

[pulse]
sigma_tau = 0.3
t_center = 2.0

[grid]
nz = 50
"""

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
NUMBER = re.compile(r"^-?\d\.\d{11}e[+-]\d{2,3}$")


def _rows(path):
    with open(path, encoding="utf-8") as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


def _fake_point(b, delta, pulse, template, policy, medium, *rest):
    value = math.exp(-0.2) * (1.0 - math.exp(-0.3 * math.sqrt(b)))
    return SweepRow(
        b=b, delta_over_gamma=delta, fidelity_mod=value,
        fidelity_mod_sq=value * value, delay=0.0,
    )


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_RUN, encoding="utf-8")
    return path


class TestRunConfig:
    def test_round_trip(self, tmp_path):
        config = RunConfig().with_overrides({
            "medium": {"optical_depth": 1.6e6},
            "schedule": {"kind": "step", "delta0": 5000.0, "t_off": 0.018, "t_on": 0.031},
            "sweep": {"b_list": [1e2, 3e2]},
        })
        path = tmp_path / "run.cfg"
        path.write_text(dump_run_config(config), encoding="utf-8")
        assert load_run_config(path) == config

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[medium]\nbogus = 1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_store_schedule_needs_times(self):
        with pytest.raises(ConfigError, match="t_off"):
            RunConfig().with_overrides({"schedule": {"kind": "step"}})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_run_config(tmp_path / "absent.cfg")

    def test_shipped_configs_load(self):
        storage = load_run_config(CONFIGS / "storage.cfg")
        assert storage.to_schedule().hold == pytest.approx(0.013)
        assert load_run_config(CONFIGS / "slowlight.cfg").to_medium().b == 6e4


class TestDispatch:
    def test_spectrum_to_stdout(self, capsys):
        assert dispatch(["spectrum", "--b", "100", "--delta", "30"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "# convention=canonical"
        header = next(i for i, line in enumerate(lines) if not line.startswith("#"))
        assert lines[header] == "omega_over_gamma,re_chi,im_chi,transmission"
        assert len(lines) - header - 1 == 1001
        assert all(NUMBER.match(v) for v in lines[header + 1].split(","))

    def test_estimate_preset(self, capsys):
        assert dispatch(["estimate", "--preset", "sr"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["b"] == pytest.approx(200.0)
        assert 10.0 <= report["v_g"] <= 1000.0
        assert report["fidelity_estimate"] is None

    @pytest.mark.parametrize("argv", [[], ["teleport"], ["spectrum", "--bogus"]])
    def test_usage_errors(self, argv):
        assert dispatch(argv) == EXIT_USAGE

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[pulse]\nwidth = 3\n", encoding="utf-8")
        assert dispatch(["spectrum", "--config", str(path)]) == EXIT_CONFIG

    def test_list_where_scalar_expected(self):
        assert dispatch(["spectrum", "--b", "1,2"]) == EXIT_CONFIG

    def test_invalid_physics_value(self, small_config, tmp_path):
        argv = ["slowlight", "--config", str(small_config), "--sigma-tau", "-1",
                "--out", str(tmp_path / "out")]
        assert dispatch(argv) == EXIT_CONFIG

    def test_solver_failure(self, small_config, tmp_path, monkeypatch):
        def diverge(*args, **kwargs):
            raise DivergenceError(3)

        monkeypatch.setattr(cli_main, "simulate", diverge)
        argv = ["slowlight", "--config", str(small_config), "--out", str(tmp_path / "out")]
        assert dispatch(argv) == EXIT_SOLVER

    def test_store_needs_times(self, small_config, tmp_path):
        argv = ["store", "--config", str(small_config), "--out", str(tmp_path / "out")]
        assert dispatch(argv) == EXIT_CONFIG


class TestOutputs:
    def test_slowlight_reproduces_from_run_cfg(self, small_config, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert dispatch(["slowlight", "--config", str(small_config), "--out", str(first)]) == EXIT_OK
        assert sorted(p.name for p in first.iterdir()) == ["run.cfg", "summary.json", "timeseries.csv"]

        rerun = ["slowlight", "--config", str(first / "run.cfg"), "--out", str(second)]
        assert dispatch(rerun) == EXIT_OK
        for name in ("timeseries.csv", "summary.json", "run.cfg"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

        summary = json.loads((first / "summary.json").read_text())
        assert summary["delay"] > 0
        assert summary["parameters"]["medium"]["optical_depth"] == 10.0

    def test_outputs_stay_in_out_dir(self, small_config, tmp_path):
        out = tmp_path / "store"
        argv = ["store", "--config", str(small_config), "--t-off", "2.5", "--t-on", "3.5",
                "--snapshots", "50", "--out", str(out)]
        assert dispatch(argv) == EXIT_OK
        assert sorted(p.name for p in tmp_path.iterdir()) == ["small.cfg", "store"]
        assert sorted(p.name for p in out.iterdir()) == [
            "run.cfg", "snapshots.csv", "summary.json", "timeseries.csv",
        ]
        summary = json.loads((out / "summary.json").read_text())
        assert 0.0 <= summary["fidelity"] <= 1.0
        assert 0.0 <= summary["fidelity_optimized"] <= 1.0

    def test_sweep_writes_long_format(self, tmp_path, monkeypatch):
        monkeypatch.setattr(heatmap_module, "_storage_point", _fake_point)
        out = tmp_path / "sweep"
        argv = ["sweep", "--b", "10,100", "--delta", "5,50", "--sigma-tau", "0.25",
                "--jobs", "1", "--out", str(out)]
        assert dispatch(argv) == EXIT_OK
        rows = _rows(out / "heatmap.csv")
        assert [(float(r["b"]), float(r["delta_over_gamma"])) for r in rows] == [
            (10.0, 5.0), (10.0, 50.0), (100.0, 5.0), (100.0, 50.0),
        ]
        assert all(NUMBER.match(r["fidelity_mod"]) for r in rows)
        meta = json.loads((out / "sweep.json").read_text())
        assert meta["metadata"]["delta_list"] == [5.0, 50.0]

    def test_optimize_then_estimate(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setattr(optimization, "_storage_point", _fake_point)
        out = tmp_path / "opt"
        assert dispatch(["optimize", "--b", "1,4,16,64,256", "--out", str(out)]) == EXIT_OK
        assert len(_rows(out / "curve.csv")) == 5
        fit = json.loads((out / "fit.json").read_text())
        assert fit["fit"] is not None
        assert fit["fit"]["c1"] == pytest.approx(0.3, rel=1e-4)
        assert fit["monotone"]

        capsys.readouterr()
        argv = ["estimate", "--preset", "sr", "--curve", str(out / "curve.csv")]
        assert dispatch(argv) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert 0.0 < report["fidelity_estimate"] < 1.0

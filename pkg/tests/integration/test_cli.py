"""Tests de integración de la CLI: simulate → train → detect, verify y bench."""

import json

import numpy as np
import pytest

from src.cli.main import build_parser, main
from src.verification.suite import CheckResult

CONFIG = {
    "model": {"random": {"n": 2, "p": 1, "m": 2, "seed": 0}},
    "horizon": 200,
    "training_horizon": 600,
    "window": 4,
    "latent_margin": 2,
    "fault": {"kind": "sensor_bias", "amplitude": 3.0, "onset": 100},
    "verify": {"random_models": 1},
    "bench": {"amplitudes": [0.0, 2.0], "trials": 2, "rho": 2, "fault_kind": "sensor_bias"},
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(CONFIG), encoding="utf-8")
    return path


def _run(command, config_file, out_dir, *extra):
    return main([command, "--config", str(config_file), "--out", str(out_dir), "--quiet", *extra])


def _pipeline(config_file, out_dir, *extra):
    for command in ("simulate", "train", "detect"):
        assert _run(command, config_file, out_dir, *extra) == 0


@pytest.mark.integration
class TestPipeline:

    def test_simulate_train_detect(self, tmp_path, config_file):
        out = tmp_path / "out"
        _pipeline(config_file, out)
        for name in ("training.csv", "signals.csv", "detector.json", "report.csv", "report.json"):
            assert (out / name).exists(), name
        for command in ("simulate", "train", "detect"):
            manifest = json.loads((out / f"{command}.manifest.json").read_text())
            assert manifest["command"] == command
            assert manifest["seed"] == 0
            assert manifest["files"]

        summary = json.loads((out / "report.json").read_text())
        assert summary["windows"] == 200 - 4 + 1
        assert summary["onset"] == 100
        assert summary["config"]["gamma"] == 4 * 1 + 2
        assert summary["mdr_settled"] == 0.0
        lines = (out / "report.csv").read_text().splitlines()
        assert lines[0] == "k,J,alarm,label"
        assert len(lines) == 1 + 197

    def test_byte_determinism(self, tmp_path, config_file):
        first, second = tmp_path / "a", tmp_path / "b"
        _pipeline(config_file, first)
        _pipeline(config_file, second)
        names = sorted(p.name for p in first.iterdir() if not p.name.endswith(".manifest.json"))
        assert names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_seed_override(self, tmp_path, config_file):
        _run("simulate", config_file, tmp_path / "a")
        _run("simulate", config_file, tmp_path / "b", "--seed", "5")
        assert (tmp_path / "a" / "signals.csv").read_bytes() != (tmp_path / "b" / "signals.csv").read_bytes()
        manifest = json.loads((tmp_path / "b" / "simulate.manifest.json").read_text())
        assert manifest["seed"] == 5

    def test_explicit_paths(self, tmp_path, config_file):
        out = tmp_path / "out"
        assert _run("simulate", config_file, out) == 0
        assert _run("train", config_file, tmp_path / "other", "--signals", str(out / "training.csv")) == 0
        code = _run(
            "detect", config_file, tmp_path / "third",
            "--detector", str(tmp_path / "other" / "detector.json"),
            "--signals", str(out / "signals.csv"),
        )
        assert code == 0
        assert (tmp_path / "third" / "report.csv").exists()


@pytest.mark.integration
class TestExitCodes:

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"horizon": 3, "window": 5}), encoding="utf-8")
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert "horizon=3" in capsys.readouterr().err

    def test_missing_signals(self, tmp_path, config_file, capsys):
        assert _run("train", config_file, tmp_path / "empty") == 2
        assert "simulate" in capsys.readouterr().err

    def test_missing_detector(self, tmp_path, config_file):
        out = tmp_path / "out"
        _run("simulate", config_file, out)
        assert _run("detect", config_file, out) == 2

    def test_unexpected_error(self, tmp_path, config_file, mocker):
        mocker.patch("src.cli.main.cmd_simulate", side_effect=RuntimeError("boom"))
        assert _run("simulate", config_file, tmp_path) == 1

    def test_quiet_output(self, tmp_path, config_file, capsys):
        _run("simulate", config_file, tmp_path)
        assert capsys.readouterr().out == ""

    def test_parser_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


@pytest.mark.integration
class TestVerify:

    def test_passes(self, tmp_path, config_file):
        out = tmp_path / "out"
        assert _run("verify", config_file, out) == 0
        payload = json.loads((out / "verification.json").read_text())
        models = {check["model"] for check in payload["checks"]}
        assert models == {"configured", "random-0"}
        assert all(check["status"] in ("pass", "n/a") for check in payload["checks"])

    def test_failure_exit_code(self, tmp_path, config_file, mocker, capsys):
        mocker.patch(
            "src.cli.commands.run_suite",
            return_value=[CheckResult("rank-law", "fail", 3.0, 4.0)],
        )
        out = tmp_path / "out"
        assert _run("verify", config_file, out) == 4
        assert "configured:rank-law" in capsys.readouterr().err
        assert (out / "verification.json").exists()

    def test_linalg_error_is_reported(self, tmp_path, config_file, mocker, capsys):
        mocker.patch(
            "src.verification.suite.kernel_rep",
            side_effect=np.linalg.LinAlgError("SVD did not converge"),
        )
        out = tmp_path / "out"
        assert _run("verify", config_file, out) == 4
        assert "configured:kernel-certificates" in capsys.readouterr().err
        payload = json.loads((out / "verification.json").read_text())
        failed = [c for c in payload["checks"] if c["label"] == "kernel-certificates"]
        assert failed and all(c["status"] == "fail" for c in failed)
        assert all(c["detail"].startswith("LinAlgError") for c in failed)


@pytest.mark.integration
@pytest.mark.slow
class TestBench:

    def test_table(self, tmp_path, config_file):
        out = tmp_path / "out"
        assert _run("bench", config_file, out) == 0
        lines = (out / "bench.csv").read_text().splitlines()
        assert lines[0] == "method,amplitude,far,mdr,mdr_settled,detection_delay,trials"
        rows = [line.split(",") for line in lines[1:]]
        assert [row[0] for row in rows] == ["projection"] * 2 + ["parity"] * 2 + ["ls_output"] * 2
        nominal = [row for row in rows if row[1] == "0"]
        # sin falla no hay ventanas con falla: MDR vacío
        assert all(row[3] == "" for row in nominal)
        assert all(row[6] == "2" for row in rows)

        dims = json.loads((out / "bench.json").read_text())
        assert dims["residual_dimensions"] == {"projection": 6, "parity": 6, "ls_output": 4}

"""File outputs, sweeps, and the command line interface."""

import json

import pytest
from click.testing import CliRunner

import smclab.cli
import smclab.runner
from smclab import DivergenceError, parse_config
from smclab.cli import main
from smclab.config import SEED_ENV_VAR
from smclab.errors import ConfigValidationError
from smclab.runner import SWEEP_HEADER, run_scenario, sweep, sweep_rows, trajectory_to_json_dict
from smclab.verification import CriterionResult

PURE_DOC = {
    "scenario": {"name": "pure-integrator", "initial_state": [2.0]},
    "controller": {"n": 1.0},
    "integrator": {"method": "rk4", "step": 1e-3, "t_end": 3.0},
    "eps_band": 1e-3,
}

UNDERSIZED_DOC = {
    "scenario": {"name": "double-integrator"},
    "controller": {"n": 0.25, "d_m": 1.0},
    "integrator": {"method": "rk4", "step": 1e-3, "t_end": 2.0},
    "disturbance": {"kind": "constant", "amplitude": 1.5},
}

SEEDED_DOC = {
    "scenario": {"name": "pendulum"},
    "controller": {"n": 0.5, "d_m": 0.6},
    "integrator": {"method": "rk4", "step": 1e-3, "t_end": 1.0},
    "disturbance": {"kind": "seeded-bounded-random", "amplitude": 0.5},
}


@pytest.fixture
def pure_cfg(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    return parse_config(json.loads(json.dumps(PURE_DOC)))


def write_doc(tmp_path, doc, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return p


class TestRunScenario:
    def test_writes_csv_and_report(self, pure_cfg, tmp_path):
        result = run_scenario(pure_cfg, tmp_path)
        assert result.csv_path.exists()
        assert result.json_path.exists()
        lines = result.csv_path.read_text().splitlines()
        assert lines[0] == "t,x0,s,u,V,d,w_norm"
        assert lines[1] == "0,2,2,-1,1,0,0"
        assert len(lines) == 1 + len(result.trajectory.samples)
        report = json.loads(result.json_path.read_text())
        assert set(report) == {"config", "samples", "error", "reach",
                               "chatter", "lyapunov", "files"}
        assert report["error"] is None
        assert report["reach"]["t_reach_measured"] == pytest.approx(2.0, abs=2e-3)
        assert report["reach"]["bound_satisfied"] is True
        assert report["lyapunov"]["violations"] == 0
        assert report["files"]["figures"] == []

    def test_two_state_header(self, tmp_path, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        cfg = parse_config(json.loads(json.dumps(UNDERSIZED_DOC)))
        result = run_scenario(cfg, tmp_path)
        header = result.csv_path.read_text().splitlines()[0]
        assert header == "t,x0,x1,s,u,V,d,w_norm"

    def test_csv_cells_round_trip_exactly(self, pure_cfg, tmp_path):
        result = run_scenario(pure_cfg, tmp_path)
        lines = result.csv_path.read_text().splitlines()[1:]
        for line, smp in zip(lines, result.trajectory.samples):
            cells = [float(c) for c in line.split(",")]
            assert cells == [smp.t, smp.x[0], smp.s, smp.u, smp.V, smp.d, smp.w_norm]

    def test_unreached_band_is_data_not_an_error(self, tmp_path, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        cfg = parse_config(json.loads(json.dumps(UNDERSIZED_DOC)))
        result = run_scenario(cfg, tmp_path)
        assert result.error is None
        assert result.report["reach"]["t_reach_measured"] is None
        assert "reason" in result.report["chatter"]

    def test_write_files_can_be_disabled(self, pure_cfg):
        result = run_scenario(pure_cfg, write_files=False)
        assert result.csv_path is None
        assert result.json_path is None
        assert "files" not in result.report

    def test_same_config_gives_identical_bytes(self, pure_cfg, tmp_path):
        a = run_scenario(pure_cfg, tmp_path / "a")
        b = run_scenario(pure_cfg, tmp_path / "b")
        assert a.csv_path.read_bytes() == b.csv_path.read_bytes()

    def test_env_seed_changes_seeded_runs(self, tmp_path, monkeypatch):
        outputs = {}
        for env_seed in ("1", "2", "1"):
            monkeypatch.setenv(SEED_ENV_VAR, env_seed)
            cfg = parse_config(json.loads(json.dumps(SEEDED_DOC)))
            out = tmp_path / f"run-{env_seed}-{len(outputs)}"
            result = run_scenario(cfg, out)
            outputs[out] = result.csv_path.read_bytes()
        runs = list(outputs.values())
        assert runs[0] != runs[1]
        assert runs[0] == runs[2]

    def test_simulator_failure_still_writes_files(self, pure_cfg, tmp_path, monkeypatch):
        from smclab import IntegratorConfig, simulate_reaching_law

        partial = simulate_reaching_law(
            1.0, 2.0, IntegratorConfig(method="rk4", step=1e-3, t_end=0.01)
        )

        def exploding(*args, **kwargs):
            raise DivergenceError("state blew up", trajectory=partial)

        monkeypatch.setattr(smclab.runner, "simulate", exploding)
        with pytest.raises(DivergenceError):
            run_scenario(pure_cfg, tmp_path)
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["error"] == "DivergenceError: state blew up"
        assert report["samples"] == len(partial.samples)
        csv_lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert len(csv_lines) == 1 + len(partial.samples)

    def test_trajectory_json_dict_shape(self, pure_cfg):
        result = run_scenario(pure_cfg, write_files=False)
        doc = trajectory_to_json_dict(result.trajectory)
        assert doc["model"] == "pure-integrator"
        assert len(doc["samples"]) == len(result.trajectory.samples)
        first = doc["samples"][0]
        assert first["t"] == 0.0
        assert first["x"] == [2.0]
        assert first["refined"] is False


class TestSweep:
    def test_rows_match_individual_runs(self, pure_cfg, tmp_path):
        rows = sweep_rows(pure_cfg, "controller.n", [0.5, 1.0])
        assert rows[0] == "controller.n,0.5,,,false"  # t_r = 4 exceeds t_end = 3
        fields = rows[1].split(",")
        assert fields[0] == "controller.n"
        assert fields[1] == "1"
        assert float(fields[2]) == pytest.approx(2.0, abs=2e-3)
        assert float(fields[3]) <= 1e-3
        assert fields[4] == "true"

    def test_csv_file_layout(self, pure_cfg, tmp_path):
        path = sweep(pure_cfg, "controller.n", [1.0, 2.0], tmp_path)
        lines = path.read_text().splitlines()
        assert lines[0] == SWEEP_HEADER
        assert len(lines) == 3

    def test_empty_values_still_validates_the_path(self, pure_cfg, tmp_path):
        path = sweep(pure_cfg, "controller.n", [], tmp_path)
        assert path.read_text() == SWEEP_HEADER + "\n"
        with pytest.raises(ConfigValidationError):
            sweep(pure_cfg, "controller.nope", [], tmp_path)

    def test_failing_value_yields_an_empty_row(self, pure_cfg, tmp_path, monkeypatch):
        def exploding(*args, **kwargs):
            raise DivergenceError("state blew up")

        monkeypatch.setattr(smclab.runner, "simulate", exploding)
        rows = sweep_rows(pure_cfg, "controller.n", [1.0])
        assert rows == ["controller.n,1,,,false"]


class TestPlotting:
    def test_figures_rendered_to_files(self, pure_cfg, tmp_path):
        result = run_scenario(pure_cfg, tmp_path, plot=True)
        assert len(result.figure_paths) == 2
        names = sorted(p.name for p in result.figure_paths)
        assert names == ["trajectory_states.png", "trajectory_surface.png"]
        for p in result.figure_paths:
            assert p.stat().st_size > 1000
        report = json.loads(result.json_path.read_text())
        assert sorted(report["files"]["figures"]) == names


class TestCli:
    def test_simulate_success(self, tmp_path):
        cfg_path = write_doc(tmp_path, PURE_DOC)
        out = tmp_path / "out"
        r = CliRunner().invoke(main, ["simulate", "--config", str(cfg_path),
                                      "--out-dir", str(out)])
        assert r.exit_code == 0, r.output
        assert "reached |s| <= 0.001" in r.output
        assert "bound_satisfied = true" in r.output
        assert (out / "trajectory.csv").exists()
        assert (out / "report.json").exists()

    def test_simulate_unreached_band_exits_zero(self, tmp_path):
        cfg_path = write_doc(tmp_path, UNDERSIZED_DOC)
        out = tmp_path / "out"
        r = CliRunner().invoke(main, ["simulate", "--config", str(cfg_path),
                                      "--out-dir", str(out)])
        assert r.exit_code == 0, r.output
        assert "band never persistently reached" in r.output

    def test_simulate_plot_flag(self, tmp_path):
        cfg_path = write_doc(tmp_path, PURE_DOC)
        out = tmp_path / "out"
        r = CliRunner().invoke(main, ["simulate", "--config", str(cfg_path),
                                      "--out-dir", str(out), "--plot"])
        assert r.exit_code == 0, r.output
        assert (out / "trajectory_surface.png").exists()
        assert (out / "trajectory_states.png").exists()

    def test_simulate_invalid_config_exits_one(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"scenario": {"name": "pure-integrator"},
                                   "controller": {"n": -1}}))
        r = CliRunner().invoke(main, ["simulate", "--config", str(bad)])
        assert r.exit_code == 1
        assert "controller.n" in r.output

    def test_simulate_runtime_failure_exits_one(self, tmp_path, monkeypatch):
        cfg_path = write_doc(tmp_path, PURE_DOC)

        def exploding(*args, **kwargs):
            raise DivergenceError("state blew up")

        monkeypatch.setattr(smclab.cli, "run_scenario", exploding)
        r = CliRunner().invoke(main, ["simulate", "--config", str(cfg_path),
                                      "--out-dir", str(tmp_path)])
        assert r.exit_code == 1
        assert "simulation error" in r.output

    def test_sweep_command(self, tmp_path):
        cfg_path = write_doc(tmp_path, PURE_DOC)
        out = tmp_path / "out"
        r = CliRunner().invoke(main, ["sweep", "--config", str(cfg_path),
                                      "--param", "controller.n",
                                      "--values", "0.5,1", "--out-dir", str(out)])
        assert r.exit_code == 0, r.output
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == SWEEP_HEADER
        assert lines[1] == "controller.n,0.5,,,false"

    def test_sweep_rejects_bad_values(self, tmp_path):
        cfg_path = write_doc(tmp_path, PURE_DOC)
        r = CliRunner().invoke(main, ["sweep", "--config", str(cfg_path),
                                      "--param", "controller.n",
                                      "--values", "a,b"])
        assert r.exit_code == 1
        assert "comma-separated numbers" in r.output

    def test_sweep_rejects_bad_param_path(self, tmp_path):
        cfg_path = write_doc(tmp_path, PURE_DOC)
        r = CliRunner().invoke(main, ["sweep", "--config", str(cfg_path),
                                      "--param", "controller.nope",
                                      "--values", "1"])
        assert r.exit_code == 1
        assert "not a sweepable numeric field" in r.output

    def test_verify_gradients_suite_passes(self):
        r = CliRunner().invoke(main, ["verify", "gradients"])
        assert r.exit_code == 0, r.output
        assert "A8" in r.output
        assert "PASS" in r.output
        assert "1/1 criteria passed" in r.output

    def test_verify_unknown_suite_is_a_usage_error(self):
        r = CliRunner().invoke(main, ["verify", "everything"])
        assert r.exit_code == 2

    def test_verify_failure_exits_one(self, monkeypatch):
        fake = CriterionResult(
            criterion="A1", description="synthetic", measured="1",
            expected="2", tolerance="0", passed=False,
        )
        monkeypatch.setattr(smclab.cli, "run_suite", lambda name: [fake])
        r = CliRunner().invoke(main, ["verify", "reaching"])
        assert r.exit_code == 1
        assert "FAIL" in r.output
        assert "0/1 criteria passed" in r.output

    def test_gradcheck_passes_for_builtin_surfaces(self):
        r = CliRunner().invoke(main, ["gradcheck", "--scenario", "pendulum",
                                      "--samples", "50"])
        assert r.exit_code == 0, r.output
        assert "PASS" in r.output

    def test_gradcheck_failure_exits_one(self, monkeypatch):
        monkeypatch.setattr(smclab.cli, "gradient_check", lambda *a, **k: 1.0)
        r = CliRunner().invoke(main, ["gradcheck", "--scenario", "pendulum"])
        assert r.exit_code == 1
        assert "FAIL" in r.output

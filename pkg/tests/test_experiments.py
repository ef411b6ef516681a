"""Experiment harness: configs, reports, determinism, CLI plumbing."""

import json

import pytest

from singelliptic import experiments as xp
from singelliptic.errors import ConfigError, NoExactSolution


def base_problem(**over):
    prob = {"operator": {"kind": "upper_partial_sum", "k": 1}, "gamma": 1.0,
            "domain": {"centers": [[0.0, 0.0]], "radius": 1.0, "dimension": 2}}
    prob.update(over)
    return prob


class TestConfigValidation:
    def test_empty_h_list(self):
        cfg = xp.ExperimentConfig(name="x", problem=base_problem(), mode="solve")
        with pytest.raises(ConfigError, match="h_list"):
            cfg.validate()

    def test_h_list_must_decrease(self):
        cfg = xp.ExperimentConfig(name="x", problem=base_problem(), mode="solve",
                                  h_list=[1 / 16, 1 / 8])
        with pytest.raises(ConfigError, match="strictly decreasing"):
            cfg.validate()

    def test_unknown_mode(self):
        cfg = xp.ExperimentConfig(name="x", problem=base_problem(), mode="wat")
        with pytest.raises(ConfigError, match="mode"):
            cfg.validate()

    def test_nonexistence_regime_named_in_error(self):
        cfg = xp.ExperimentConfig(
            name="x", problem=base_problem(alpha=-1.0, beta=-1.0),
            mode="solve", h_list=[1 / 8])
        with pytest.raises(ConfigError, match="beta = -1.0 <= -1"):
            cfg.validate()

    def test_drift_threshold_named_in_error(self):
        cfg = xp.ExperimentConfig(
            name="x", problem=base_problem(drift_b=1.5, drift_sign=1),
            mode="solve", h_list=[1 / 8])
        with pytest.raises(ConfigError, match="b R = 1.5 >= k = 1"):
            cfg.validate()

    def test_probe_mode_allows_nonexistence_regime(self):
        cfg = xp.ExperimentConfig(
            name="x", problem=base_problem(alpha=-1.0, beta=-1.0),
            mode="probe", h_list=[1 / 8])
        spec = cfg.validate()
        assert spec.beta == -1.0


class TestConfigFiles:
    def test_json_config(self, tmp_path):
        data = {"name": "json-test", "problem": base_problem(), "mode": "solve",
                "grid": {"h_list": [0.125], "width": 2}, "tol": 1e-4}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        cfg = xp.load_config(path)
        assert cfg.name == "json-test"
        assert cfg.h_list == [0.125]
        assert cfg.tol == 1e-4

    def test_toml_config(self, tmp_path):
        text = """
name = "toml-test"
mode = "probe"
tol = 1e-5

[grid]
h_list = [0.125]
width = 2

[problem]
gamma = 1.0
alpha = -1.0
beta = -1.0

[problem.operator]
kind = "upper_partial_sum"
k = 1

[problem.domain]
centers = [[0.0, 0.0]]
radius = 2.0
dimension = 2
"""
        path = tmp_path / "cfg.toml"
        path.write_text(text)
        cfg = xp.load_config(path)
        assert cfg.mode == "probe"
        assert cfg.problem["domain"]["radius"] == 2.0
        spec = cfg.validate()
        assert spec.beta == -1.0


class TestOracleRegistry:
    def test_hemisphere_oracle(self):
        cfg = xp.ExperimentConfig(name="x", problem=base_problem(), mode="solve",
                                  h_list=[1 / 8])
        spec = cfg.validate()
        prof = xp.oracle_profile_for(spec)
        assert prof is not None
        assert prof.value(0.0) == pytest.approx(1.0)

    def test_no_oracle_for_two_balls(self):
        prob = base_problem(domain={"centers": [[-0.5, 0.0], [0.5, 0.0]],
                                    "radius": 1.0, "dimension": 2})
        cfg = xp.ExperimentConfig(name="x", problem=prob, mode="solve",
                                  h_list=[1 / 8])
        assert xp.oracle_profile_for(cfg.validate()) is None

    def test_study_requires_oracle(self):
        prob = base_problem(domain={"centers": [[-0.5, 0.0], [0.5, 0.0]],
                                    "radius": 1.0, "dimension": 2})
        cfg = xp.ExperimentConfig(name="x", problem=prob,
                                  mode="convergence_study", h_list=[1 / 8])
        with pytest.raises(NoExactSolution):
            xp.run(cfg)


class TestRunners:
    def test_solve_mode_writes_tables(self, tmp_path):
        cfg = xp.ExperimentConfig(name="mini", problem=base_problem(),
                                  mode="solve", h_list=[1 / 8], tol=1e-4)
        bundle = xp.run(cfg)
        assert bundle.summary["errors"][0] < 0.15
        path = bundle.write(tmp_path)
        assert (tmp_path / "summary.json").exists()
        assert (tmp_path / "convergence.csv").exists()
        loaded = json.loads(open(path).read())
        assert loaded["config_hash"] == xp.config_hash(cfg)
        assert loaded["version"]

    def test_convergence_study_orders(self, tmp_path):
        cfg = xp.ExperimentConfig(name="mini", problem=base_problem(),
                                  mode="convergence_study",
                                  h_list=[1 / 8, 1 / 16], tol=1e-4)
        bundle = xp.run(cfg)
        rows = bundle.tables["convergence"]
        assert "observed_order" in rows[1]
        assert rows[1]["linf_error"] < rows[0]["linf_error"]
        # ragged rows (the first has no observed_order) must still write
        bundle.write(tmp_path)
        header = (tmp_path / "convergence.csv").read_text().splitlines()[0]
        assert "observed_order" in header

    def test_ode_only_table(self):
        cfg = xp.ExperimentConfig(name="mini", problem=base_problem(),
                                  mode="ode_only", gammas=[0.5, 1.0])
        bundle = xp.run(cfg)
        assert bundle.summary["c1_verdicts"] == [True, False]

    def test_summary_determinism_byte_identical(self, tmp_path):
        for sub in ("a", "b"):
            xp.run_preset("barrier_ordering", out_dir=tmp_path / sub, seed=3)
        a = (tmp_path / "a" / "summary.json").read_bytes()
        b = (tmp_path / "b" / "summary.json").read_bytes()
        assert a == b


class TestCli:
    def test_oracle_subcommand(self, capsys):
        code = xp.main(["oracle"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["ok"]
        assert out["max_residual"] <= 1e-6

    def test_preset_subcommand(self, capsys, tmp_path):
        code = xp.main(["probe", "--preset", "barrier_ordering",
                        "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "summary.json").exists()
        out = json.loads(capsys.readouterr().out)
        assert out["ordering_violations"] == 0

    def test_config_subcommand(self, capsys, tmp_path):
        data = {"name": "cli-solve", "problem": base_problem(), "mode": "solve",
                "grid": {"h_list": [0.125], "width": 2}, "tol": 1e-4}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        code = xp.main(["solve", "--config", str(path), "--out",
                        str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "summary.json").exists()
        capsys.readouterr()

    def test_missing_config_is_error(self, capsys):
        code = xp.main(["solve"])
        assert code == 1
        assert "config error" in capsys.readouterr().err

    def test_unknown_preset_is_error(self, capsys):
        code = xp.main(["probe", "--preset", "nope"])
        assert code == 1
        capsys.readouterr()

    def test_scan_requires_b_values(self, capsys, tmp_path):
        data = {"name": "scan", "problem": base_problem(), "mode": "probe",
                "grid": {"h_list": [0.125], "width": 2}}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        code = xp.main(["scan", "--config", str(path)])
        assert code == 1
        capsys.readouterr()

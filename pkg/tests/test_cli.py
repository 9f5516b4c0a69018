import json
import os
import shutil
import subprocess
import sys

import pytest

from causal_eval.bench.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def factorial(tmp_path):
    assert run("gen", "factorial", "--out", tmp_path, "--n-subjects", 40,
               "--n-treatments", 2, "--n-outcomes", 2, "--seed", 1) == 0
    return tmp_path / "factorial.csv", tmp_path / "roles.json"


class TestCommands:
    def test_gen_synthetic(self, tmp_path):
        assert run("gen", "synthetic", "--out", tmp_path, "--n-dags", 2, "--n-vars", 5, "--n-samples", 50) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["data_000.csv", "data_001.csv", "net_000.json", "net_001.json"]

    def test_validate(self, factorial, capsys):
        assert run("validate", "--factorial", factorial[0], "--roles", factorial[1]) == 0
        assert "ok" in capsys.readouterr().out

    def test_bias_learn_eval(self, factorial, tmp_path):
        biased = tmp_path / "biased.csv"
        assert run("bias", "--factorial", factorial[0], "--roles", factorial[1], "--covariate", "C",
                   "--beta", 2, "--seed", 3, "--out", biased) == 0
        assert len(biased.read_text().strip().splitlines()) == 41

        gen = tmp_path / "syn"
        run("gen", "synthetic", "--out", gen, "--n-dags", 1, "--n-vars", 5, "--n-samples", 2000)
        learned = tmp_path / "g.json"
        assert run("learn", "--data", gen / "data_000.csv", "--learner", "ges", "--out", learned) == 0
        out = tmp_path / "eval.json"
        assert run("eval", "--true-net", gen / "net_000.json", "--learned", learned,
                   "--data", gen / "data_000.csv", "--out", out) == 0
        doc = json.loads(out.read_text())
        assert {"shd", "sid", "tvd_mean", "tvd_sum"} <= set(doc)
        assert run("eval", "--true-net", gen / "net_000.json", "--learned", learned,
                   "--data", gen / "data_000.csv", "--sid-bounds", "--out", out) == 0
        lo, hi = json.loads(out.read_text())["sid_bounds"]
        assert lo <= doc["sid"] <= hi

    def test_experiment(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"experiment": "correlation", "n_dags": 2, "n_vars": 5,
                                   "n_samples": 300, "learners": ["ges"]}))
        assert run("experiment", "--config", cfg, "--out", tmp_path / "r", "--workers", 2) == 0
        assert (tmp_path / "r" / "summary.json").exists()


class TestExitCodes:
    def test_config_error(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"experiment": "fig9"}))
        assert run("experiment", "--config", cfg, "--out", tmp_path / "r") == 2

    def test_missing_output_dir_is_config_error(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"experiment": "correlation", "n_dags": 1}))
        assert run("experiment", "--config", cfg) == 2

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run("learn", "--learner", "fci")
        assert exc.value.code == 2

    def test_data_errors(self, factorial, tmp_path):
        lines = factorial[0].read_text().splitlines(keepends=True)
        broken = tmp_path / "broken.csv"
        broken.write_text("".join(lines[:-1]))
        assert run("validate", "--factorial", broken, "--roles", factorial[1]) == 3
        assert run("validate", "--factorial", tmp_path / "nope.csv", "--roles", factorial[1]) == 3
        assert run("bias", "--factorial", factorial[0], "--roles", factorial[1], "--covariate", "O1",
                   "--out", tmp_path / "b.csv") == 3


def test_console_script_and_worker_env(tmp_path):
    exe = shutil.which("causal-eval")
    cmd = [exe] if exe else [sys.executable, "-m", "causal_eval.bench.cli"]
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "correlation", "n_dags": 2, "n_vars": 4,
                               "n_samples": 200, "learners": ["pc"]}))
    env = {**os.environ, "CAUSAL_EVAL_WORKERS": "2"}
    done = subprocess.run(cmd + ["experiment", "--config", str(cfg), "--out", str(tmp_path / "r")],
                          env=env, capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
    assert "2 rows" in done.stdout

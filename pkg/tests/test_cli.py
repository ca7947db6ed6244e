import json
import subprocess
import sys

import pytest

from banditlab.cli import main

BASE_CONFIG = {
    "schema_version": 1,
    "horizon": 300,
    "replications": 2,
    "master_seed": 42,
    "instance": {"means": [0.2, 0.5, 0.9]},
    "algorithms": [{"algorithm": "samba", "params": {"alpha": 0.05}}],
    "corruption": {"schemes": ["none", "consecutive"], "budgets": [0, 5]},
}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], lines[1:]


class TestRun:
    def test_happy_path_outputs(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out = tmp_path / "out"
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_rows(out / "results.csv")
        assert header == "algorithm,scheme,corruption_level,K,mean_regret,sd_regret,replications,seed"
        assert len(rows) == 4  # 2 schemes x 2 budgets x 1 algorithm
        first = rows[0].split(",")
        assert first[0] == "samba"
        assert first[3] == "3"
        assert first[6] == "2"
        curves_header, curve_rows = read_rows(out / "curves.csv")
        assert curves_header == "algorithm,scheme,corruption_level,t,mean_regret,sd_regret"
        assert curve_rows  # one row per cell per checkpoint
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["generator"] == "philox4x64-splitmix64"
        assert manifest["master_seed"] == 42
        assert sorted(manifest["outputs"]) == ["curves.csv", "results.csv"]

    def test_missing_config_flag(self, capsys):
        assert main(["run"]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", "--config", str(path)]) == 2

    def test_wrong_schema_version(self, tmp_path):
        cfg = write_config(tmp_path, {**BASE_CONFIG, "schema_version": 2})
        assert main(["run", "--config", cfg]) == 2

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda c: c.update(algorithms=[]),
            lambda c: c.update(algorithms=[{"algorithm": "thompson"}]),
            lambda c: c.update(horizon=0),
            lambda c: c.update(replications=0),
            lambda c: c.update(instance={"means": [0.5]}),
            lambda c: c.update(instance={"means": [0.5, 1.7]}),
            lambda c: c.update(corruption={"scheme": "midnight", "budget": 5}),
            lambda c: c.update(corruption={"scheme": "consecutive", "budget": -2}),
            lambda c: c.update(corruption={"schemes": [], "budgets": [5]}),
            lambda c: c.update(master_seed=-1),
            lambda c: c.update(master_seed=2**64),
        ],
    )
    def test_config_errors_exit_2(self, tmp_path, mutate):
        payload = json.loads(json.dumps(BASE_CONFIG))
        mutate(payload)
        cfg = write_config(tmp_path, payload)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_budget_exceeding_capacity_exit_2(self, tmp_path):
        payload = {**BASE_CONFIG, "horizon": 100,
                   "corruption": {"scheme": "consecutive", "budget": 200}}
        cfg = write_config(tmp_path, payload)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_k_grid_requires_sweep(self, tmp_path):
        payload = {**BASE_CONFIG, "instance": {"k": [4, 6], "means": "uniform"}}
        cfg = write_config(tmp_path, payload)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_seed_override_changes_rows(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg, "--out", str(out_a)]) == 0
        assert main(["run", "--config", cfg, "--out", str(out_b), "--seed", "7"]) == 0
        assert (out_a / "results.csv").read_text() != (out_b / "results.csv").read_text()
        assert json.loads((out_b / "manifest.json").read_text())["master_seed"] == 7


class TestReproducibility:
    def test_rerun_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg, "--out", str(out_a)]) == 0
        assert main(["run", "--config", cfg, "--out", str(out_b)]) == 0
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()
        assert (out_a / "curves.csv").read_bytes() == (out_b / "curves.csv").read_bytes()

    def test_threads_flag_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg, "--out", str(out_a), "--threads", "1"]) == 0
        assert main(["run", "--config", cfg, "--out", str(out_b), "--threads", "2"]) == 0
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()
        assert (out_a / "curves.csv").read_bytes() == (out_b / "curves.csv").read_bytes()

    def test_config_hash_ignores_key_order(self, tmp_path):
        reordered = {k: BASE_CONFIG[k] for k in reversed(list(BASE_CONFIG))}
        cfg_a = write_config(tmp_path, BASE_CONFIG, "a.json")
        cfg_b = write_config(tmp_path, reordered, "b.json")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg_a, "--out", str(out_a)]) == 0
        assert main(["run", "--config", cfg_b, "--out", str(out_b)]) == 0
        hash_a = json.loads((out_a / "manifest.json").read_text())["config_hash"]
        hash_b = json.loads((out_b / "manifest.json").read_text())["config_hash"]
        assert hash_a == hash_b

    def test_different_config_different_hash(self, tmp_path):
        cfg_a = write_config(tmp_path, BASE_CONFIG, "a.json")
        cfg_b = write_config(tmp_path, {**BASE_CONFIG, "master_seed": 43}, "b.json")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", cfg_a, "--out", str(out_a)])
        main(["run", "--config", cfg_b, "--out", str(out_b)])
        hash_a = json.loads((out_a / "manifest.json").read_text())["config_hash"]
        hash_b = json.loads((out_b / "manifest.json").read_text())["config_hash"]
        assert hash_a != hash_b


class TestSweep:
    def test_k_grid(self, tmp_path):
        payload = {
            "schema_version": 1,
            "horizon": 200,
            "replications": 2,
            "master_seed": 9,
            "instance": {"k": [4, 6], "means": "uniform"},
            "algorithms": [{"algorithm": "samba", "params": {"alpha": 0.05}}],
        }
        cfg = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_rows(out / "results.csv")
        assert [r.split(",")[3] for r in rows] == ["4", "6"]

    def test_empty_grid_exit_2(self, tmp_path):
        payload = {**BASE_CONFIG, "instance": {"k": [], "means": "uniform"}}
        cfg = write_config(tmp_path, payload)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_label_distinguishes_same_algorithm(self, tmp_path):
        payload = {
            **BASE_CONFIG,
            "corruption": None,
            "algorithms": [
                {"algorithm": "samba", "params": {"alpha": 0.02}, "label": "samba_slow"},
                {"algorithm": "samba", "params": {"alpha": 0.2}, "label": "samba_hot"},
            ],
        }
        payload.pop("corruption")
        cfg = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_rows(out / "results.csv")
        assert [r.split(",")[0] for r in rows] == ["samba_slow", "samba_hot"]


class TestBench:
    def test_bench_columns(self, tmp_path):
        payload = {
            "schema_version": 1,
            "horizon": 800,
            "replications": 2,
            "algorithms": [
                {"algorithm": "samba", "params": {"alpha": 0.05}},
                {"algorithm": "barbar"},
            ],
            "instance": {"means": [0.2, 0.5, 0.9]},
        }
        cfg = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert main(["bench", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_rows(out / "bench.csv")
        assert header == "algorithm,mean_s,sd_s,step_ratio"
        assert [r.split(",")[0] for r in rows] == ["samba", "barbar"]
        for row in rows:
            assert float(row.split(",")[1]) > 0


class TestVerifyCommand:
    # full-size verification runs in the acceptance gate; --fast keeps the
    # command-level plumbing checks quick

    CONFIG = {
        "schema_version": 1,
        "alpha": 0.05,
        "master_seed": 2024,
    }

    def test_clean_pass_exit_0(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        code = main(["verify", "--config", cfg, "--fast"])
        out = capsys.readouterr().out
        assert code == 0
        assert "all 9 checks passed" in out
        assert "drift_nonleader_clean" in out

    def test_tampered_update_exit_1_names_drift(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        code = main(["verify", "--config", cfg, "--fast", "--tamper-update"])
        out = capsys.readouterr().out
        assert code == 1
        failing = [line for line in out.splitlines() if "FAIL" in line]
        assert failing
        assert any("drift_nonleader" in line for line in failing)

    def test_bad_alpha_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, {**self.CONFIG, "alpha": 1.5})
        assert main(["verify", "--config", cfg, "--fast"]) == 2


class TestProcessLevel:
    def test_module_entrypoint_and_argparse_exit(self):
        # unknown subcommand: argparse exits 2 at the process boundary
        proc = subprocess.run(
            [sys.executable, "-m", "banditlab.cli", "explode"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2

    def test_help_exits_zero(self):
        proc = subprocess.run(
            [sys.executable, "-m", "banditlab.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "run" in proc.stdout and "verify" in proc.stdout

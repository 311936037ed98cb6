"""CLI subcommands and exit codes."""

import json

import pytest

from qnnlab.circuits import AnsatzFamily, AnsatzSpec, build_fixed_ansatz, save_circuit
from qnnlab.cli import main
from qnnlab.topology import guadalupe


def write_config(path, **overrides):
    data = {
        "experiment": "random_sweep",
        "qubits": [2],
        "depths": [2],
        "trials": 3,
        "observable": "proj0_last",
        "train": {"epochs": 2},
        "master_seed": 5,
        "dataset_size": 20,
    }
    data.update(overrides)
    path.write_text(json.dumps(data))
    return path


class TestRun:
    def test_random_sweep_exit_zero(self, tmp_path, capsys):
        config = write_config(tmp_path / "config.json")
        code = main(["run", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out/random_sweep/N2_L2/free/raw.csv").exists()
        result = json.loads(capsys.readouterr().out)
        assert result["experiment"] == "random_sweep"

    def test_missing_config_is_config_error(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1

    def test_invalid_config_is_config_error(self, tmp_path):
        config = write_config(tmp_path / "config.json", trials=0)
        assert main(["run", "--config", str(config)]) == 1

    def test_workers_override(self, tmp_path):
        config = write_config(tmp_path / "config.json")
        code = main([
            "run", "--config", str(config), "--workers", "2",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 0

    def test_theory_check_clean_exit(self, tmp_path):
        sweep_config = write_config(tmp_path / "sweep.json")
        assert main(["run", "--config", str(sweep_config),
                     "--out", str(tmp_path / "res")]) == 0
        check = tmp_path / "check.json"
        check.write_text(json.dumps({
            "experiment": "theory_check",
            "sweep_results": str(tmp_path / "res/random_sweep"),
            "mc_dims": [2],
            "mc_samples": 500,
        }))
        assert main(["run", "--config", str(check),
                     "--out", str(tmp_path / "report")]) == 0
        report = json.loads((tmp_path / "report/theory_check/report.json").read_text())
        assert report["bound_check"]["total_violations"] == 0

    def test_violation_exit_code(self, tmp_path, monkeypatch):
        # force a violating trace: one trial far below an inflated ensemble mean
        cell = tmp_path / "res/N4_L1/free"
        cell.mkdir(parents=True)
        (cell / "raw.csv").write_text(
            "trial,epoch,loss\n0,0,0.01\n1,0,2.0\n2,0,2.0\n"
        )
        (cell / "config.json").write_text(json.dumps({
            "num_qubits": 4, "depth": 1, "arm": "free", "observable": "z_last",
        }))
        check = tmp_path / "check.json"
        check.write_text(json.dumps({
            "experiment": "theory_check",
            "sweep_results": str(tmp_path / "res"),
            "mc_dims": [2],
            "mc_samples": 500,
        }))
        assert main(["run", "--config", str(check),
                     "--out", str(tmp_path / "report")]) == 3


class TestSummarize:
    def test_glob_and_combined_csv(self, tmp_path, capsys):
        config = write_config(tmp_path / "config.json")
        main(["run", "--config", str(config), "--out", str(tmp_path / "out")])
        combined = tmp_path / "long.csv"
        code = main([
            "summarize", str(tmp_path / "out/**/raw.csv"), "--out", str(combined),
        ])
        assert code == 0
        assert combined.exists()
        assert "final_mean" in capsys.readouterr().out

    def test_missing_files(self, tmp_path):
        assert main(["summarize", str(tmp_path / "none/raw.csv")]) == 1


class TestTheory:
    def test_prints_moment_table(self, capsys):
        code = main(["theory", "--d", "2,4", "--samples", "1000"])
        assert code == 0
        out = capsys.readouterr().out
        assert "z_last" in out and "proj0_last" in out

    def test_report_file(self, tmp_path):
        report = tmp_path / "moments.json"
        code = main(["theory", "--d", "2", "--samples", "500", "--out", str(report)])
        assert code == 0
        entries = json.loads(report.read_text())
        assert len(entries) == 2

    def test_bad_dims(self):
        assert main(["theory", "--d", "2;4"]) == 1


class TestRoute:
    def test_restricted_circuit_reports_no_overhead(self, tmp_path, capsys):
        circuit = build_fixed_ansatz(
            AnsatzSpec(AnsatzFamily.FIXED, 5, 2, restricted=True), guadalupe()
        )
        path = tmp_path / "circuit.json"
        save_circuit(circuit, path)
        code = main(["route", "--topology", "guadalupe", "--circuit", str(path)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["swaps"] == 0
        assert report["physical_cnots"] == report["logical_two_qubit"]

    def test_free_circuit_reports_overhead(self, tmp_path, capsys):
        circuit = build_fixed_ansatz(
            AnsatzSpec(AnsatzFamily.FIXED, 5, 1, restricted=False), guadalupe()
        )
        path = tmp_path / "circuit.json"
        save_circuit(circuit, path)
        assert main(["route", "--circuit", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["logical_two_qubit"] == 4
        assert report["physical_cnots"] == 16

    def test_missing_circuit_file(self, tmp_path):
        assert main(["route", "--circuit", str(tmp_path / "none.json")]) == 1

    def test_unknown_topology(self, tmp_path):
        circuit = build_fixed_ansatz(AnsatzSpec(AnsatzFamily.FIXED, 2, 1), guadalupe())
        path = tmp_path / "c.json"
        save_circuit(circuit, path)
        assert main(["route", "--topology", "marschip", "--circuit", str(path)]) == 1

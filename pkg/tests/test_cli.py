import json

import numpy as np
import pytest

from spconvex.cli import main
from spconvex.serialize import dump_json, matrix_to_json
from conftest import selfadjoint


def run(args):
    return main(args)


class TestVerifyCommand:
    def test_small_suite_passes(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--suite", "bcl", "--dim", "3", "--trials", "10",
                    "--seed", "5", "--p", "1.5,2.5", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["checks"]["bcl"]["count"] == 20
        assert report["checks"]["bcl"]["violations"] == 0
        assert report["config"]["master_seed"] == 5
        assert len(report["records"]) == 20

    def test_out_of_range_p_exits_2(self, capsys):
        assert run(["verify", "--suite", "bcl", "--p", "0.9"]) == 2
        assert "p values" in capsys.readouterr().err

    def test_unknown_suite_exits_2(self):
        assert run(["verify", "--suite", "nonsense"]) == 2

    def test_unknown_flag_exits_2(self):
        assert run(["verify", "--frobnicate"]) == 2

    def test_zero_tolerance_triggers_violation_exit(self, tmp_path):
        out = tmp_path / "v.json"
        code = run(["verify", "--suite", "bcl", "--dim", "2", "--trials", "10",
                    "--seed", "5", "--p", "2.0", "--tol", "0", "--out", str(out)])
        assert code == 1
        dumps = sorted(tmp_path.glob("v.violation.*.json"))
        assert dumps
        payload = json.loads(dumps[0].read_text())
        assert "inputs" in payload and "A" in payload["inputs"]
        assert payload["inputs"]["A"]["rows"] == 2

    def test_csv_output(self, tmp_path):
        out = tmp_path / "report.csv"
        code = run(["verify", "--suite", "fp", "--trials", "5", "--p", "1.5",
                    "--out", str(out)])
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "check,param,trial_seed,gap,normalized_gap"

    def test_config_file_defaults_and_override(self, tmp_path):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"dim": 2, "trials": 3, "seed": 11, "suite": "bcl",
                                   "p": [1.5]}))
        out = tmp_path / "r.json"
        code = run(["--config", str(cfg), "verify", "--trials", "4", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["dim"] == 2            # from config file
        assert report["config"]["trials"] == 4         # flag overrides file
        assert report["config"]["master_seed"] == 11

    def test_p_grid_parsing(self, tmp_path):
        out = tmp_path / "r.json"
        code = run(["verify", "--suite", "bcl", "--dim", "2", "--trials", "2",
                    "--p-grid", "1.2:1.6:0.2", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["p_values"] == [1.2, 1.4, 1.6]

    def test_thread_pool_matches_sequential(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        base = ["verify", "--suite", "fp", "--trials", "6", "--p", "1.5", "--seed", "2"]
        assert run(base + ["--out", str(a)]) == 0
        assert run(base + ["--threads", "2", "--out", str(b)]) == 0
        ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
        ra.pop("wall_clock_seconds")
        rb.pop("wall_clock_seconds")
        assert ra == rb


class TestSweepCommand:
    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(["sweep", "--check", "bcl", "--dim", "2", "--trials", "5",
                    "--p-grid", "1.5:2.5:0.5", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("check,param,count")
        assert len(lines) == 4  # header + three grid points


class TestSecondDerivCommand:
    def test_matrix_json_inputs(self, tmp_path):
        rng = np.random.default_rng(3)
        A = selfadjoint(rng, 3) + 4.0 * np.eye(3)
        B = selfadjoint(rng, 3)
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        with open(pa, "w") as fh:
            dump_json(matrix_to_json(A), fh)
        with open(pb, "w") as fh:
            dump_json(matrix_to_json(B), fh)
        out = tmp_path / "sd.json"
        code = run(["second-deriv", "--a", str(pa), "--b", str(pb), "--p", "1.5",
                    "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["fd_second_rel_err"] <= 1e-4
        assert payload["norm_sq_second_derivative"] >= payload["chain_lower_bound"] - 1e-9

    def test_requires_both_matrices(self, tmp_path):
        assert run(["second-deriv", "--a", str(tmp_path / "missing.json")]) == 2

    def test_missing_file_exits_2(self, tmp_path):
        code = run(["second-deriv", "--a", str(tmp_path / "nope.json"),
                    "--b", str(tmp_path / "nope2.json")])
        assert code == 2

    def test_random_inputs(self, tmp_path):
        out = tmp_path / "sd.json"
        assert run(["second-deriv", "--dim", "3", "--seed", "7", "--p", "1.3",
                    "--out", str(out)]) == 0


class TestTightnessCommand:
    def test_csv_scan(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = run(["tightness", "--p", "1.5", "--eps", "1e-2,1e-3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "p,eps,rho,rho_minus_pm1"
        rho = float(lines[2].split(",")[2])
        assert rho == pytest.approx(0.5, abs=1e-4)

    def test_eps_validation(self):
        assert run(["tightness", "--p", "1.5", "--eps", "0.5"]) == 2


class TestExtremalCommand:
    def test_small_search(self, tmp_path):
        out = tmp_path / "ex.json"
        code = run(["extremal", "--p", "1.5", "--dim", "2", "--iters", "200",
                    "--restarts", "2", "--seed", "3", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["best_normalized_gap"] >= -1e-9
        assert payload["argmin"]["A"]["rows"] == 2


def test_missing_subcommand_exits_2():
    assert run([]) == 2


def test_violation_dump_serializes_channel_inputs(tmp_path):
    from spconvex import QuantumChannel
    from spconvex.cli import _dump_violations
    from spconvex.verify import GapRecord, SuiteReport, TrialConfig

    rng = np.random.default_rng(0)
    M = selfadjoint(rng, 2)
    ch = QuantumChannel(kraus=(np.eye(2, dtype=complex),))
    rec = GapRecord(check="monotone", param=0.5, trial_seed=1, gap=-1.0,
                    normalizer=1.0, normalized_gap=-1.0,
                    inputs={"A": M, "channel": ch})
    report = SuiteReport(config=TrialConfig(), summaries={}, records=[rec],
                         violations=[rec], failures=[], wall_clock=0.0)
    _dump_violations(report, tmp_path / "out.json")
    payload = json.loads((tmp_path / "out.violation.0.json").read_text())
    assert payload["inputs"]["A"]["rows"] == 2
    assert payload["inputs"]["channel"]["kraus"][0]["rows"] == 2

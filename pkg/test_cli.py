import json

import numpy as np
import pandas as pd
import pytest

from modules.cli import main


def _run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_worked_problem(self, capsys, worked_problem_file, tmp_path):
        trace = tmp_path / "trace.csv"
        code, out, _ = _run(capsys, ["solve", worked_problem_file, "--epsilon", "1e-6", "--trace", str(trace)])
        assert code == 0
        report = json.loads(out)
        assert report["converged"] is True
        assert 0.5 <= report["f_value"] <= 0.5 + 1e-6
        assert report["lambda"] == [1.0, 0.0, 0.0, 0.0]
        assert sum(item["weight"] for item in report["decomposition"]) == pytest.approx(1.0)
        frame = pd.read_csv(trace)
        assert list(frame.columns) == ["iteration", "f", "gap", "lower_bound", "best_lower_bound"]

    def test_deterministic_output(self, capsys, worked_problem_file):
        _, first, _ = _run(capsys, ["solve", worked_problem_file])
        _, second, _ = _run(capsys, ["solve", worked_problem_file])
        assert first == second

    def test_iteration_cap_exit_code(self, capsys, tmp_path):
        path = tmp_path / "interior.json"
        path.write_text(
            json.dumps(
                {
                    "A": [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
                    "b": [1.0, 1.0, 1.0, 1.0],
                    "objective": {"Q": [[1.0, 0.0], [0.0, 1.0]], "c": [-0.5, -0.3], "r": 0.0},
                    "x0": [1.0, 1.0],
                }
            ),
            encoding="utf-8",
        )
        code, out, _ = _run(capsys, ["solve", str(path), "--max-iter", "2", "--epsilon", "1e-12"])
        assert code == 2
        assert json.loads(out)["converged"] is False

    def test_max_iter_zero_rejected(self, capsys, worked_problem_file):
        code, _, err = _run(capsys, ["solve", worked_problem_file, "--max-iter", "0"])
        assert code == 1
        assert "max_iter" in err

    def test_malformed_problem_names_field(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"A": [[1.0]], "b": [1.0, 2.0], "objective": {"Q": [[1.0]], "c": [0.0], "r": 0}}')
        code, out, err = _run(capsys, ["solve", str(path)])
        assert code == 1
        assert out == ""
        assert "b:" in err

    def test_unknown_command(self, capsys):
        code, _, _ = _run(capsys, ["optimize"])
        assert code == 1


class TestSensitivity:
    def test_worked_example(self, capsys, worked_problem_file):
        code, out, _ = _run(capsys, ["sensitivity", worked_problem_file, "--b-prime", "1.1,1,0,0"])
        assert code == 0
        report = json.loads(out)
        assert report["verified"] is True
        assert report["eq3"]["lower"] == pytest.approx(0.4, abs=1e-9)
        assert report["eq3"]["upper"] == pytest.approx(0.405, abs=1e-9)
        assert report["lambda"] == [1.0, 0.0, 0.0, 0.0]

    def test_identity(self, capsys, worked_problem_file):
        code, out, _ = _run(capsys, ["sensitivity", worked_problem_file, "--b-prime", "[1, 1, 0, 0]", "--x", "1,0.5"])
        assert code == 0
        report = json.loads(out)
        assert report["eq2"] == report["eq1"]
        assert report["eq3"] == report["eq1"]

    def test_far_perturbation(self, capsys, worked_problem_file):
        code, out, _ = _run(
            capsys, ["sensitivity", worked_problem_file, "--b-prime", "1.1,1,0,-0.6", "--x", "1,0.5"]
        )
        assert code == 3
        report = json.loads(out)
        assert report["x_prime_feasible"] is False
        assert 1 in report["violated_rows"]

    def test_infeasible_perturbation(self, capsys, worked_problem_file):
        code, _, err = _run(capsys, ["sensitivity", worked_problem_file, "--b-prime", "1,1,0,-2", "--x", "1,0.5"])
        assert code == 1
        assert "ERROR" in err

    def test_wrong_length(self, capsys, worked_problem_file):
        code, _, err = _run(capsys, ["sensitivity", worked_problem_file, "--b-prime", "1,1"])
        assert code == 1
        assert "b_prime" in err


class TestSweep:
    def test_worked_sweep(self, capsys, worked_problem_file, tmp_path):
        out_path = tmp_path / "sweep.csv"
        argv = [
            "sweep", worked_problem_file, "--row", "0",
            "--delta-min", "-0.2", "--delta-max", "0.2", "--steps", "9", "--out", str(out_path),
        ]
        code, out, _ = _run(capsys, argv)
        assert code == 0
        summary = json.loads(out)
        assert summary["points"] == 9
        assert summary["certified_delta_max"] == pytest.approx(0.2)
        frame = pd.read_csv(out_path)
        assert len(frame) == 9
        at = frame.iloc[6]
        assert at["eq3_lower"] == pytest.approx(0.4, abs=1e-9)
        assert at["eq3_upper"] == pytest.approx(0.405, abs=1e-9)
        assert at["exact_fstar"] == pytest.approx(0.405, abs=1e-9)
        slope = (frame["exact_fstar"].iloc[5] - frame["exact_fstar"].iloc[3]) / 0.1
        assert slope == pytest.approx(-1.0, abs=1e-6)
        assert frame["within_certified_range"].all()
        assert out_path.read_bytes().count(b"\r") == 0

    def test_explicit_analysis_point(self, capsys, worked_problem_file, tmp_path):
        out_path = tmp_path / "sweep_x.csv"
        argv = [
            "sweep", worked_problem_file, "--row", "0", "--x", "1,0.5", "--no-exact",
            "--delta-min", "0", "--delta-max", "0.1", "--steps", "2", "--out", str(out_path),
        ]
        code, out, _ = _run(capsys, argv)
        assert code == 0
        assert json.loads(out)["points"] == 2
        frame = pd.read_csv(out_path)
        assert frame["eq3_upper"].iloc[1] == pytest.approx(0.405, abs=1e-9)

    def test_analysis_point_wrong_length(self, capsys, worked_problem_file, tmp_path):
        argv = [
            "sweep", worked_problem_file, "--row", "0", "--x", "1,0.5,0",
            "--delta-min", "0", "--delta-max", "0.1", "--steps", "2", "--out", str(tmp_path / "s.csv"),
        ]
        code, _, err = _run(capsys, argv)
        assert code == 1
        assert "ERROR" in err

    def test_steps_validated(self, capsys, worked_problem_file, tmp_path):
        argv = [
            "sweep", worked_problem_file, "--row", "0",
            "--delta-min", "0", "--delta-max", "0.1", "--steps", "1", "--out", str(tmp_path / "s.csv"),
        ]
        code, _, _ = _run(capsys, argv)
        assert code == 1

    def test_row_out_of_range(self, capsys, worked_problem_file, tmp_path):
        argv = [
            "sweep", worked_problem_file, "--row", "7",
            "--delta-min", "0", "--delta-max", "0.1", "--steps", "2", "--out", str(tmp_path / "s.csv"),
        ]
        code, _, _ = _run(capsys, argv)
        assert code == 1


class TestVerify:
    def test_worked_example(self, capsys, worked_problem_file):
        code, out, _ = _run(capsys, ["verify", worked_problem_file, "--b-prime", "1.1,1,0,0"])
        assert code == 0
        document = json.loads(out)
        assert document["passed"] is True
        slacks = {check["name"]: check["slack"] for check in document["checks"]}
        assert slacks["eq3.lower"] == pytest.approx(0.005, abs=1e-9)

    def test_halved_smoothness(self, capsys, tmp_path):
        path = tmp_path / "stretch.json"
        path.write_text(
            json.dumps(
                {
                    "A": [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
                    "b": [1.0, 1.0, 0.0, 0.0],
                    "objective": {"Q": [[4.0, 0.0], [0.0, 1.0]], "c": [-5.0, -0.5], "r": 0.0},
                }
            ),
            encoding="utf-8",
        )
        argv = ["verify", str(path), "--b-prime", "1.5,1,0,0", "--x", "1,0.5", "--smoothness-scale", "0.5"]
        code, out, _ = _run(capsys, argv)
        assert code == 3
        slacks = {check["name"]: check["slack"] for check in json.loads(out)["checks"]}
        assert slacks["eq2.upper"] < 0

    def test_size_guard(self, capsys, tmp_path):
        n = 20
        path = tmp_path / "big.json"
        path.write_text(
            json.dumps(
                {
                    "A": np.vstack([np.eye(n), -np.eye(n)]).tolist(),
                    "b": [1.0] * (2 * n),
                    "objective": {"Q": np.eye(n).tolist(), "c": [0.0] * n, "r": 0.0},
                }
            ),
            encoding="utf-8",
        )
        code, out, _ = _run(capsys, ["verify", str(path), "--b-prime", json.dumps([1.0] * (2 * n))])
        assert code == 4
        assert out == ""

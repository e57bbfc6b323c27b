import json
import subprocess
import sys

import pytest

from bskop.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCommands:
    def test_eval(self, capsys):
        code, out, _ = run(capsys, "eval", "--n", "4", "--r", "1", "--func", "pr1", "--x", "0.5")
        assert code == 0 and float(out) == pytest.approx(0.5, abs=1e-15)

    def test_eval_expression(self, capsys):
        code, out, _ = run(capsys, "eval", "--d", "2", "--n", "9", "--r", "2",
                           "--func", "expr:x1*x2", "--x", "0.5,0.5")
        assert code == 0 and float(out) == pytest.approx(0.25, abs=1e-14)

    def test_moments(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "9", "--r", "2", "--d", "2", "--x", "0.3,0.8")
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[1:3]]
        for row in rows:
            assert float(row[1]) == pytest.approx(float(row[2]), abs=1e-13)
            assert float(row[3]) == pytest.approx(float(row[4]), abs=1e-13)

    def test_modulus(self, capsys):
        code, out, _ = run(capsys, "modulus", "--kind", "tau", "--func", "step", "--delta", "0.05")
        rep = json.loads(out)
        assert code == 0 and rep["kind"] == "tau"
        assert rep["value"] == pytest.approx(0.05, rel=0.03)

    def test_bounds(self, capsys):
        code, out, _ = run(capsys, "bounds", "--r", "2", "--n-list", "5,9")
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("n,r,d,a_nr")
        assert float(lines[1].split(",")[3]) == pytest.approx(22 / 432)
        assert all(line.endswith("true") for line in lines[1:])

    def test_verify(self, capsys):
        code, out, _ = run(capsys, "verify", "--theorem", "lpnorm", "--func", "cos",
                           "--r", "2", "--n-list", "5,9", "--p", "2")
        rep = json.loads(out)
        assert code == 0 and rep["theorem_id"] == "lp_norm_bound"
        assert rep["max_ratio"] <= 1 + 1e-8

    def test_converge_csv(self, capsys, tmp_path):
        out_file = tmp_path / "c.csv"
        code, out, _ = run(capsys, "converge", "--func", "pr1", "--r", "1", "--n-list", "9,19",
                           "--p", "1,2", "--grid", "65", "--out", str(out_file))
        lines = out_file.read_text().splitlines()
        assert code == 0 and out == ""
        assert len(lines) == 5
        assert float(lines[1].split(",")[2]) == pytest.approx(0.025, abs=1e-10)

    def test_converge_json(self, capsys):
        code, out, _ = run(capsys, "converge", "--func", "kink", "--r", "2", "--n-geom", "8:32",
                           "--format", "json", "--grid", "65")
        rep = json.loads(out)
        assert code == 0 and [row["n"] for row in rep["rows"]] == [8, 16, 32]


class TestExitCodes:
    def test_regime(self, capsys):
        code, _, err = run(capsys, "eval", "--d", "2", "--n", "4", "--r", "2", "--x", "0.1,0.1")
        assert code == 3 and "error" in err

    def test_budget(self, capsys):
        code, _, _ = run(capsys, "converge", "--d", "3", "--r", "1", "--n-list", "40",
                         "--budget", "1000")
        assert code == 4

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "eval", "--n", "5", "--func", "expr:x1 +", "--x", "0.5")
        assert code == 2 and "position" in err

    def test_unknown_function(self, capsys):
        code, _, _ = run(capsys, "eval", "--n", "5", "--func", "nope", "--x", "0.5")
        assert code == 2

    def test_io(self, capsys, tmp_path):
        code, _, _ = run(capsys, "bounds", "--n-list", "5", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 5

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["modulus", "--kind", "bogus"])
        assert info.value.code == 2


def test_converge_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "bskop", "converge", "--func", "kink", "--r", "2",
            "--n-geom", "8:64", "--p", "1,2"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first.count(b"\n") == 1 + 4 * 2

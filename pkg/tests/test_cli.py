import csv
import io

import pytest

from tempered_tvp.cli import run


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_wellposed_example4(capsys):
    assert run(["wellposed", "--example", "4", "--alpha", "0.5", "--lambda", "2"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert float(out["beta"]) == pytest.approx(1 / 3)
    assert out["contraction_holds"] == "true"


def test_solve_tvp_prints_summary(capsys):
    argv = ["solve-tvp", "--example", "2", "--alpha", "0.5", "--lambda", "2", "--method", "abm",
            "--n", "40", "--eps", "1e-10"]
    assert run(argv) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert abs(float(out["y0"])) < 1e-2
    assert float(out["terminal_mismatch"]) < 1e-9
    assert int(out["bisections"]) <= 60


def test_converge_layout(capsys):
    argv = ["converge", "--example", "1", "--alpha", "0.25,1/2", "--lambda", "2",
            "--method", "bdq", "--n", "10,20"]
    assert run(argv) == 0
    data = rows(capsys.readouterr().out)
    assert len(data) == 4
    assert list(data[0]) == ["n", "h", "alpha", "y0", "err_a", "err_b", "max_err", "eoc"]
    assert float(data[3]["alpha"]) == 0.5


def test_converge_idempotent(tmp_path):
    argv = ["converge", "--example", "3", "--method", "colloc", "--n", "10,20"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_perturb_and_solve_ivp(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert run(["perturb", "--perturb", "bc", "--eps-list", "0.1,0.01", "--n", "20",
                "--out", str(out)]) == 0
    data = rows(out.read_text())
    assert float(data[0]["dev"]) == pytest.approx(0.25704, rel=1e-4)
    assert run(["solve-ivp", "--example", "3", "--method", "colloc", "--colloc-order", "2",
                "--n", "20"]) == 0
    data = rows(capsys.readouterr().out)
    assert len(data) == 21 and float(data[0]["y"]) == 0.0


def test_usage_errors_are_aggregated(capsys):
    assert run(["converge", "--example", "9", "--alpha", "1.5", "--n", "0"]) == 1
    err = capsys.readouterr().err
    assert "example" in err and "--alpha" in err and "--n" in err
    assert run(["solve-tvp", "--colloc-points", "0.5,1"]) == 1
    assert run(["frobnicate"]) == 1
    assert run(["solve-tvp", "--alpha", "abc"]) == 1


def test_numerical_failure_leaves_no_file(tmp_path, capsys):
    out = tmp_path / "t.csv"
    argv = ["solve-tvp", "--example", "1", "--method", "bdq", "--n", "10",
            "--newton-tol", "1e-300", "--out", str(out)]
    assert run(argv) == 2
    assert capsys.readouterr().err.startswith("numerical failure")
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []

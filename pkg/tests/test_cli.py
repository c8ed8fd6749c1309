import csv
import io
import json
import math

import pytest

from expbounds.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def error_of(err):
    return json.loads(err.strip().splitlines()[-1])


def test_bounds_two_nodes(capsys):
    r = run_json(capsys, "bounds", "--x", "0,1", "--y", "0,1")
    assert r["log_lower"] == 0.5
    assert r["log_det"] == pytest.approx(0.541325, abs=1e-6)
    assert r["log_upper"] == 1.0
    assert r["log_hadamard"] == 1.0
    assert r["log_effective_upper"] == 1.0
    assert r["det_if_representable"] == pytest.approx(math.e - 1, rel=1e-14)
    assert r["precision_achieved"] <= 1e-20


def test_bounds_single_node(capsys):
    r = run_json(capsys, "bounds", "--x", "0", "--y", "0")
    assert r["log_lower"] == r["log_det"] == r["log_upper"] == 0.0


def test_bounds_rejects_decreasing(capsys):
    code, out, err = run(capsys, "bounds", "--x", "0,1", "--y", "1,0")
    assert code == 2 and out == ""
    e = error_of(err)
    assert e["error"] == "NotStrictlyIncreasing"


@pytest.mark.parametrize(
    "argv, kind",
    [
        (("bounds", "--x", "0,1", "--y", "0"), "DimensionMismatch"),
        (("bounds", "--x", "0,a", "--y", "0,1"), "UsageError"),
        (("bounds", "--x", "0,nan", "--y", "0,1"), "NonFinite"),
        (("bounds", "--x", "", "--y", ""), "Empty"),
        (("bounds", "--y", "0,1"), "UsageError"),
        (("gauss", "select", "--t", "1"), "DegenerateNodes"),
        (("gauss", "bounds", "--t", "0,1", "--lambda", "-1"), "InvalidLambda"),
        (("gauss", "sweep", "--t", "0,1", "--lambda", "1:2"), "UsageError"),
        (("gauss", "sweep", "--t", "0,1", "--lambda", "1:2:3", "--loocv"), "UsageError"),
    ],
)
def test_invalid_input_exit_2(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert error_of(err)["error"] == kind


def test_unknown_subcommand_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    assert error_of(capsys.readouterr().err)["error"] == "UsageError"


def test_precision_flag_and_env(capsys, monkeypatch):
    r = run_json(capsys, "bounds", "--x", "0,1", "--y", "0,1", "--precision", "128")
    assert r["input"]["precision_bits"] == 128
    monkeypatch.setenv("EXPDET_PREC", "512")
    r = run_json(capsys, "bounds", "--x", "0,1", "--y", "0,1")
    assert r["input"]["precision_bits"] == 512
    # flag wins over the environment
    r = run_json(capsys, "bounds", "--x", "0,1", "--y", "0,1", "--precision", "64")
    assert r["input"]["precision_bits"] == 64
    monkeypatch.setenv("EXPDET_PREC", "lots")
    code, _, err = run(capsys, "bounds", "--x", "0,1", "--y", "0,1")
    assert code == 2 and error_of(err)["error"] == "UsageError"


def test_node_files(capsys, tmp_path):
    xf = tmp_path / "x.txt"
    xf.write_text("# rows\n0\n1  # second\n\n2\n")
    r = run_json(capsys, "bounds", "--x-file", str(xf), "--y", "0,1,2")
    assert r["input"]["x"] == [0.0, 1.0, 2.0]
    assert math.exp(r["log_det"]) == pytest.approx(math.e * (math.e - 1) ** 3 * (math.e + 1), rel=1e-12)
    code, _, err = run(capsys, "bounds", "--x-file", str(tmp_path / "missing"), "--y", "0")
    assert code == 2


def test_negative_leading_list(capsys):
    r = run_json(capsys, "bounds", "--x=-1,1", "--y=-1,1")
    assert r["n"] == 2 and r["log_lower"] <= r["log_det"] <= r["log_upper"]


def test_identity_examples(capsys):
    r = run_json(capsys, "identity", "--x", "0,1,2")
    assert r["checks"]["corollary"]["residual"] <= 1e-10
    r = run_json(capsys, "identity", "--x", "0,1,2", "--u-sum", "2")
    assert r["checks"]["theorem"]["residual"] <= 1e-8 and r["checks"]["theorem"]["passed"]
    r = run_json(capsys, "identity", "--x", "0,1,2", "--y", "0,1,3")
    assert r["checks"]["reduction"]["residual"] <= 1e-8


def test_identity_too_many_dims(capsys):
    code, _, err = run(capsys, "identity", "--x", "0,1,2,3,4")
    assert code == 2 and error_of(err)["error"] == "TooManyDims"


def test_gauss_select(capsys):
    r = run_json(capsys, "gauss", "select", "--t", "0,1,2")
    assert r["lambda_star"] == 1.5 and r["N"] == 3 and r["S"] == 2.0


def test_gauss_bounds(capsys):
    r = run_json(capsys, "gauss", "bounds", "--t", "0,1", "--lambda", "1")
    assert r["log_lower"] == -0.5 and r["log_upper"] == 0.0
    assert r["log_det"] == pytest.approx(-0.4587, abs=1e-4)
    r = run_json(capsys, "gauss", "bounds", "--t", "0,1,2", "--lambda", "auto")
    assert r["input"]["lambda"] == 1.5


def test_gauss_sweep_csv(capsys):
    code, out, _ = run(capsys, "gauss", "sweep", "--t", "0,1,2", "--lambda", "0.1:10:50")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 50
    assert list(rows[0]) == ["lambda", "log_f", "log_lower", "log_det", "log_upper", "error"]
    best = max(rows, key=lambda r: float(r["log_f"]))
    lams = [float(r["lambda"]) for r in rows]
    assert float(best["lambda"]) == min(lams, key=lambda g: abs(math.log(g / 1.5)))
    assert all(float(r["log_lower"]) <= float(r["log_det"]) + 1e-9 for r in rows)
    assert all(r["error"] == "" for r in rows)


def test_gauss_sweep_loocv_json(capsys):
    r = run_json(
        capsys, "gauss", "sweep", "--t", "0,1,2", "--values", "0,1,0", "--lambda", "0.5:2:4", "--loocv", "--format", "json"
    )
    assert len(r["rows"]) == 4
    assert all(row["loocv"] > 0 for row in r["rows"])


def test_gauss_interp(capsys):
    r = run_json(capsys, "gauss", "interp", "--t", "0,1,2", "--values", "0,1,0")
    assert r["input"]["lambda"] == 1.5
    c = r["coefficients"]
    assert c[0] == pytest.approx(c[2], rel=1e-14) and c[1] > 0 > c[0]
    assert r["node_residual_norm"] <= 1e-8
    assert r["solve_residual"] <= 1e-8
    r = run_json(capsys, "gauss", "interp", "--t", "0,1", "--values", "1,0", "--lambda", "1")
    d = 1 - math.exp(-1)
    assert r["coefficients"] == pytest.approx([1 / d, -math.exp(-0.5) / d], rel=1e-14)


def test_verify_small_run(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2..3", "--trials", "5", "--seed", "3")
    r = json.loads(out)
    assert code == 0 and r["failures"] == 0


def test_verify_deterministic(capsys):
    a = run(capsys, "verify", "--n", "2..4", "--trials", "1", "--seed", "11")
    b = run(capsys, "verify", "--n", "2..4", "--trials", "1", "--seed", "11")
    assert a == b


def test_verify_bad_range(capsys):
    code, _, err = run(capsys, "verify", "--n", "5..2")
    assert code == 2 and error_of(err)["error"] == "UsageError"

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from bellscope.cli import main


def call(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_vectors(capsys):
    code, out, _ = call(capsys, "vectors", "--d", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x1,x2"
    assert lines[1:] == ["1,0", "-0.5,0.866025404", "-0.5,-0.866025404"]
    code, out, _ = call(capsys, "vectors", "--d", "2")
    assert out.strip().splitlines()[1:] == ["1", "-1"]


def test_vectors_bad_d(capsys):
    code, out, err = call(capsys, "vectors", "--d", "1")
    assert code == 1 and out == "" and "error" in err
    code, _, err = call(capsys, "vectors")
    assert code == 1


def test_usage_errors(capsys):
    assert call(capsys, "bogus")[0] == 1
    assert call(capsys, "table", "--d-list", "3,x")[0] == 1
    assert call(capsys, "scan", "--d", "3", "--r-min", "2", "--r-max", "1")[0] == 1
    assert call(capsys, "scan", "--d", "3", "--steps", "1")[0] == 1
    assert call(capsys, "fit", "--input", "/nonexistent.csv")[0] == 1


def test_limit(capsys):
    code, out, _ = call(capsys, "limit", "--asymptote")
    assert code == 0
    assert float(rows(out)[0]["bell"]) == pytest.approx(2.96981, abs=1e-5)
    code, out, _ = call(capsys, "limit", "--d", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == "bellscope/1"
    assert doc["bell"] == pytest.approx(4 / (6 * math.sqrt(3) - 9), abs=1e-12)


def test_lhv_bounds(capsys):
    code, out, _ = call(capsys, "lhv-bounds", "--d", "3", "--enumerate")
    r = rows(out)[0]
    assert code == 0 and float(r["min"]) == -4 and float(r["max"]) == 2


def test_table_epr(capsys):
    code, out, _ = call(capsys, "table", "--d-list", "2,5,10,15,20,25", "--mode", "epr", "--restarts", "2")
    assert code == 0
    got = {int(r["d"]): r for r in rows(out)}
    assert float(got[2]["bell"]) == pytest.approx(2 * math.sqrt(2), abs=1e-8)
    for d, want in zip((5, 10, 15, 20, 25), (2.91055, 2.9398, 2.94973, 2.95473, 2.9577)):
        assert float(got[d]["bell"]) == pytest.approx(want, abs=1e-4)
        assert got[d]["r_opt"] == "" and got[d]["converged"] == "true"


def test_table_nopa_d5(capsys):
    code, out, _ = call(capsys, "table", "--d-list", "5", "--mode", "nopa", "--restarts", "2")
    r = rows(out)[0]
    assert code == 0
    assert float(r["bell"]) >= 2.9886 - 1e-3
    assert 1.0 < float(r["r_opt"]) < 2.0


def test_scan_fixed_d(capsys):
    code, out, _ = call(capsys, "scan", "--d", "3", "--r-min", "0", "--r-max", "2", "--steps", "5", "--restarts", "2")
    rs = rows(out)
    assert code == 0 and len(rs) == 5
    assert float(rs[0]["r"]) == 0 and float(rs[0]["bell"]) <= 2 + 1e-6


@pytest.mark.slow
def test_scan_over_d_nondecreasing(capsys):
    ds = list(range(3, 26))
    code, out, _ = call(capsys, "scan", "--d-list", ",".join(map(str, ds)), "--mode", "nopa", "--restarts", "1")
    vals = [float(r["bell"]) for r in rows(out)]
    assert code == 0 and len(vals) == len(ds)
    assert all(b >= a - 2e-3 for a, b in zip(vals, vals[1:]))
    # endpoint agrees with the table command
    code, out, _ = call(capsys, "table", "--d-list", "25", "--mode", "nopa", "--restarts", "1")
    assert float(rows(out)[0]["bell"]) == pytest.approx(vals[-1], abs=1e-3)


def test_optimize_json_diagnostics(capsys):
    code, out, _ = call(capsys, "optimize", "--d", "3", "--mode", "nopa", "--r", "1.0",
                        "--restarts", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "bellscope/1"
    assert set(doc["settings"]) == {"A1", "A2", "B1", "B2"}
    assert len(doc["settings"]["A1"]["params"]) == 6
    assert len(doc["restarts"]) == 2
    assert abs(doc["bell"] - doc["reevaluated_bell"]) < 1e-10


def test_output_is_reproducible(capsys, tmp_path):
    args = ["optimize", "--d", "3", "--mode", "nopa", "--restarts", "2", "--format", "json"]
    outs = []
    for k in range(2):
        path = tmp_path / f"o{k}.json"
        assert main(args + ["--output", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_fit_synthetic(capsys, tmp_path):
    path = tmp_path / "synthetic.csv"
    lines = ["d,bell"] + [f"{d},{3 - 1 / d + 2 / d**2 - 2 * math.exp(-d)!r}" for d in range(2, 13)]
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = call(capsys, "fit", "--input", str(path), "--format", "json")
    doc = json.loads(out)
    assert code == 0
    for k, want in zip("abce", (3, -1, 2, -2)):
        assert abs(doc[k] - want) < 1e-9


def test_fit_rank_deficient(capsys, tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("d,bell\n5,3.0\n")
    assert call(capsys, "fit", "--input", str(path))[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bellscope", "limit", "--d", "2"],
                          capture_output=True, text=True, check=True)
    assert rows(proc.stdout)[0]["bell"] == "2.82842712"


def test_strict_mode_exit_code(capsys, monkeypatch):
    import bellscope.cli as cli
    real = cli.maximize_bell

    def unconverged(problem):
        res = real(problem)
        res.converged = False
        return res

    monkeypatch.setattr(cli, "maximize_bell", unconverged)
    args = ["optimize", "--d", "2", "--restarts", "1"]
    assert call(capsys, *args)[0] == 0
    code, out, err = call(capsys, *args, "--strict")
    assert code == 2 and "converge" in err
    # the table still emits rows and flags them without strict mode
    code, out, _ = call(capsys, "table", "--d-list", "3", "--mode", "nopa", "--r", "1.0", "--restarts", "1")
    assert code == 0 and rows(out)[0]["converged"] == "false"

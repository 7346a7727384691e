import json
import subprocess
import sys

import numpy as np
import pytest

from rfaded import __version__
from rfaded.cli import RunConfig, main
from rfaded.reference import reference_row


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], [l.split(",") for l in lines[1:]]


def test_wsgd_weights(tmp_path, capsys):
    out = tmp_path / "w.csv"
    code, stdout, _ = run(["weights", "--kind", "wsgd", "--order", 2, "--count", 5, "--out", out], capsys)
    assert code == 0 and "5" in stdout
    assert out.read_text() == "k,value\n0,1\n1,-2\n2,1\n3,0\n4,0\n"
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["version"] == __version__ and side["kind"] == "wsgd"


def test_start_weights_are_one_based(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(["weights", "--kind", "start", "--order", 0.5, "--count", 3, "--out", out], capsys)[0] == 0
    header, rows = read_rows(out)
    assert header == "k,value" and [r[0] for r in rows] == ["1", "2", "3"]
    assert float(rows[0][1]) == pytest.approx(0.5641895835477563, rel=1e-15)


def test_values_round_trip(tmp_path, capsys):
    out = tmp_path / "f.csv"
    run(["weights", "--kind", "fbdf2", "--order", 0.3, "--count", 20, "--out", out], capsys)
    from rfaded.weights import fbdf2_weights

    _, rows = read_rows(out)
    assert np.array_equal([float(r[1]) for r in rows], fbdf2_weights(0.3, 20).coeffs)


def test_table_and_replay(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    argv = ["table", "--example", 1, "--gamma", 0.6, "--alpha", 0.2, "--beta", 1.6, "--grids", "16,32,64,128", "--out", out]
    code, stdout, _ = run(argv + ["--workers", 2], capsys)
    assert code == 0 and "order" in stdout
    header, rows = read_rows(out)
    assert header == "h,error,order" and rows[0][2] == ""
    ref = reference_row(1, 0.6, 0.2, 1.6)
    errs = np.array([float(r[1]) for r in rows])
    assert np.all((errs / np.array(ref.errors) > 0.5) & (errs / np.array(ref.errors) < 2))
    first = out.read_bytes()
    out.unlink()
    assert run(["replay", out.with_suffix(".json")], capsys)[0] == 0
    assert out.read_bytes() == first


def test_stability_files(tmp_path, capsys):
    argv = ["stability", "--out-dir", tmp_path, "--n-theta", 256]
    for a in (0.4, 0.6, 0.8, 1.0):
        argv += ["--alpha", a]
    code, stdout, _ = run(argv, capsys)
    assert code == 0
    csvs = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert csvs == ["locus_alpha0.4.csv", "locus_alpha0.6.csv", "locus_alpha0.8.csv", "locus_alpha1.csv"]
    header, rows = read_rows(tmp_path / "locus_alpha1.csv")
    assert header == "theta,re,im" and len(rows) == 257
    assert float(rows[128][1]) == pytest.approx(4.0, abs=1e-12)
    side = json.loads((tmp_path / "locus_alpha0.6.json").read_text())
    assert side["alphas"] == [0.4, 0.6, 0.8, 1.0]


def test_solve_and_dump(tmp_path, capsys):
    out, dump = tmp_path / "u.csv", tmp_path / "D.csv"
    argv = ["solve", "--example", 2, "--gamma", 0.5, "--alpha", 0.5, "--beta", 1.9, "--M", 8, "--N", 4, "--out", out, "--dump-matrix", "D", dump]
    code, stdout, _ = run(argv, capsys)
    assert code == 0 and "max error" in stdout
    header, rows = read_rows(out)
    assert header == "t,x,value" and len(rows) == 5 * 9
    assert [float(r[0]) for r in rows[:9]] == [0.0] * 9
    dh, drows = read_rows(dump)
    assert dh == "i,j,value" and len(drows) == 49
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["t0_offset"] == 1e-3 and side["run_dominant"] is True


def test_solve_sine_without_offset(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["solve", "--example", "sine", "--M", 8, "--no-t0-offset", "--out", out], capsys)
    assert code == 0
    assert json.loads(out.with_suffix(".json").read_text())["t0_offset"] is None


def test_analytic(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, _ = run(["analytic", "--example", "sine", "--x", "0.5", "--t", "0.25,0.5", "--out", out], capsys)
    assert code == 0
    header, rows = read_rows(out)
    assert header == "x,t,value" and len(rows) == 2
    assert float(rows[0][2]) == pytest.approx(0.10933079006970858, rel=1e-10)


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--example", 1, "--gamma", 1.5, "--alpha", 0.5, "--beta", 1.9, "--M", 16],
        ["solve", "--example", 1, "--M", 16],
        ["table", "--example", 1, "--gamma", 0.6, "--alpha", 0.2, "--beta", 1.6, "--grids", "16,24"],
        ["weights", "--kind", "wsgd", "--order", 2.5, "--count", 4],
        ["stability", "--alpha", 1.5],
        ["analytic", "--example", "sine", "--x", "2.0"],
        ["frobnicate"],
        ["table", "--example", 1, "--grids", "a,b"],
    ],
)
def test_argument_errors(tmp_path, capsys, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    code, stdout, err = run(argv, capsys)
    assert code == 2
    assert err.count("\n") == 1 and stdout == ""
    assert not list(tmp_path.iterdir())


def test_computation_error(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, err = run(["analytic", "--example", 1, "--gamma", 0.5, "--alpha", 0.5, "--beta", 1.9, "--out", out], capsys)
    assert code == 1 and "ConvergenceError" in err


def test_replay_rejects_unknown_keys(tmp_path, capsys):
    side = tmp_path / "x.json"
    side.write_text(json.dumps({"subcommand": "weights", "bogus": 1}))
    assert run(["replay", side], capsys)[0] == 2


def test_config_roundtrip():
    cfg = RunConfig("table", example="1", gamma=0.6, alpha=0.2, beta=1.6, grids=(16, 32))
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_module_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "rfaded", "weights", "--kind", "grunwald", "--order", "0.5", "--count", "3", "--out", str(tmp_path / "g.csv")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("wrote 3")
    assert (tmp_path / "g.csv").read_text() == "k,value\n0,1\n1,-0.5\n2,-0.125\n"


def test_fmt_seventeen_digits():
    from rfaded.io import fmt

    assert [fmt(v) for v in (1.0, 1.1, -2.0, 1e-20, None, 3)] == ["1", "1.1000000000000001", "-2", "9.9999999999999995e-21", "", "3"]
    assert float(fmt(0.1 + 0.2)) == 0.1 + 0.2

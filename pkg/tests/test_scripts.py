import importlib.util
from pathlib import Path

import numpy as np
import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def read(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding=None)


def test_fbdf2_weights(tmp_path):
    out = tmp_path / "w.csv"
    load("fbdf2_weights").main(["--count", "6", "--out", str(out)])
    d = read(out)
    assert d.dtype.names == ("k", "alpha03", "alpha07")
    assert d["alpha03"][0] == pytest.approx(1.5**0.3, rel=1e-15)


def test_stability_regions(tmp_path):
    load("stability_regions").main(["--alpha", "0.8", "--alpha", "1", "--n-theta", "512", "--out-dir", str(tmp_path)])
    d = read(tmp_path / "areas.csv")
    assert list(d["alpha"]) == [0.8, 1.0]
    assert d["region_area"][0] > d["region_area"][1]
    assert (tmp_path / "locus_alpha1.csv").exists()


def test_solution_profiles(tmp_path):
    load("solution_profiles").main(["--set", "example2_beta_sweep", "--M", "16", "--out-dir", str(tmp_path)])
    d = read(tmp_path / "example2_beta_sweep.csv")
    assert sorted(set(d["value"])) == [1.1, 1.6, 1.9, 2.0]
    assert np.max(np.abs(d["numeric"] - d["exact"])) < 5e-3


@pytest.mark.slow
def test_reproduce_tables(tmp_path, capsys):
    load("reproduce_tables").main(["--out-dir", str(tmp_path)])
    assert len(list(tmp_path.glob("block*.csv"))) == 6
    d = read(tmp_path / "block1.csv")
    assert np.all((d["ratio"] > 0.5) & (d["ratio"] < 2))

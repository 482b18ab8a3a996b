import json

import numpy as np
import pytest

from gfscore import Dataset
from gfscore.cli import main
from gfscore.io import write_csv

from conftest import random_dataset


@pytest.fixture
def csv_path(tmp_path):
    ds = random_dataset(np.random.default_rng(0), 6, 30, 2, center=False)
    path = tmp_path / "data.csv"
    write_csv(ds, path)
    return path


def test_select(csv_path, tmp_path, capsys):
    out = tmp_path / "sel.txt"
    assert main(["select", "--data", str(csv_path), "--method", "gfs", "--gamma", "10", "--num-features", "2",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# method=gfs k=2")
    assert len(lines) == 3


def test_bench_writes_document(csv_path, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["bench", "--data", str(csv_path), "--method", "fisher,gfs", "--gamma", "5", "--trials", "2",
                 "--num-features", "2", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert [r["method"] for r in doc["results"]] == ["fisher", "gfs"]
    assert doc["results"][1]["trials"][0]["trace"]
    assert "±" in capsys.readouterr().out


def test_curve_and_trace(csv_path, tmp_path):
    out = tmp_path / "c.tsv"
    assert main(["curve", "--data", str(csv_path), "--method", "fisher", "--num-features", "1:3", "--trials", "2",
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
    tr = tmp_path / "t.tsv"
    assert main(["trace", "--data", str(csv_path), "--gamma", "10", "--m", "2", "--out", str(tr)]) == 0
    text = tr.read_text().splitlines()
    assert text[0].startswith("t\tconstraint") and text[-1].startswith("# termination=")


@pytest.mark.parametrize(
    "args",
    [
        ["--method", "lasso"],
        ["--gamma", "1", "--gamma-grid", "1,2"],
        ["--num-features", "a:b"],
        ["--num-features", "99"],
        ["--trials", "0"],
        ["--train-frac", "1.5"],
        ["--gamma", "-1"],
    ],
)
def test_configuration_errors(csv_path, args):
    assert main(["bench", "--data", str(csv_path), *args]) == 2


def test_data_errors(tmp_path):
    assert main(["bench", "--data", str(tmp_path / "missing.csv")]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,a\nfoo,b\n")
    assert main(["select", "--data", str(bad)]) == 3


def test_solver_failure_exit_code(csv_path, monkeypatch):
    import gfscore.cli as cli
    from gfscore.solver import SolverError

    def boom(*a, **k):
        raise SolverError("forced")

    monkeypatch.setattr(cli, "cutting_plane", boom)
    assert main(["trace", "--data", str(csv_path)]) == 4

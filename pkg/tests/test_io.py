import json
import warnings

import numpy as np
import pytest

from gfscore import Dataset
from gfscore.evaluation import AggregateResult, MethodConfig, TrialResult
from gfscore.io import (
    FormatError,
    ResultsDocument,
    emit_curve,
    format_curve,
    load_csv,
    load_dataset,
    load_libsvm,
    read_results,
    write_csv,
    write_libsvm,
    write_results,
)

from conftest import random_dataset


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_csv_example(tmp_path):
    ds = load_csv(_write(tmp_path, "a.csv", "x1,x2,y\n1,2,a\n3,4,b\n5,6,a\n"))
    np.testing.assert_array_equal(ds.features, [[1, 3, 5], [2, 4, 6]])
    assert ds.labels.tolist() == [1, 2, 1]
    assert ds.class_names == ("a", "b")
    assert ds.feature_names == ("x1", "x2")


def test_load_csv_named_label_column(tmp_path):
    ds = load_csv(_write(tmp_path, "a.csv", "cls,x\nb,1\na,2\n"), label_col="cls")
    assert ds.labels.tolist() == [1, 2] and ds.class_names == ("b", "a")
    np.testing.assert_array_equal(ds.features, [[1, 2]])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("x,y\n1,a\n2\n", ":3:"),
        ("x,y\n1,a\nfoo,b\n", ":3:"),
        ("x,y\n1,a\n2,\n", ":3:"),
        ("", "empty"),
    ],
)
def test_load_csv_errors(tmp_path, text, fragment):
    with pytest.raises(FormatError, match=fragment):
        load_csv(_write(tmp_path, "bad.csv", text))


def test_load_libsvm_example(tmp_path):
    ds = load_libsvm(_write(tmp_path, "a.svm", "1 1:0.5 3:2\n2 2:1\n"))
    np.testing.assert_array_equal(ds.features, [[0.5, 0], [0, 1], [2, 0]])
    assert ds.labels.tolist() == [1, 2]
    ds = load_libsvm(_write(tmp_path, "b.svm", "+1 1:1\n-1\n"))
    np.testing.assert_array_equal(ds.features, [[1, 0]])


@pytest.mark.parametrize("line", ["1 2:1 1:1", "1 1:1 1:2", "1 0:1", "1 1:x"])
def test_load_libsvm_errors(tmp_path, line):
    with pytest.raises(FormatError, match=":2:"):
        load_libsvm(_write(tmp_path, "bad.svm", "1 1:1\n" + line + "\n"))


def test_csv_libsvm_roundtrip_full_precision(tmp_path, rng):
    X = rng.normal(size=(3, 7))
    X[1, 2] = 0.0
    X[0, 0] = 0.1 + 0.2
    ds = Dataset(X, [1, 2, 3, 1, 2, 3, 1], class_names=("u", "v", "w"))
    write_libsvm(ds, tmp_path / "a.svm")
    mid = load_libsvm(tmp_path / "a.svm")
    write_csv(mid, tmp_path / "a.csv")
    back = load_csv(tmp_path / "a.csv")
    np.testing.assert_array_equal(back.features, X)
    assert [back.class_names[k - 1] for k in back.labels] == ["u", "v", "w"] * 2 + ["u"]


def test_loader_is_deterministic(tmp_path):
    p = _write(tmp_path, "a.csv", "x,y\n1.5,a\n2.5,b\n")
    a, b = load_dataset(p), load_dataset(p)
    np.testing.assert_array_equal(a.features, b.features)
    assert a.labels.tolist() == b.labels.tolist()


def _doc():
    trials = [TrialResult(0, [1, 2], 0.75, 10.0, [{"m": 1, "termination": "gap", "iterations": []}]),
              TrialResult(1, [0, 2], 1.0)]
    return ResultsDocument("bench", {"seed": 0}, [AggregateResult.from_trials("gfs", trials)],
                           tool_version="0.1.0", created_at="2026-01-01T00:00:00+00:00", wall_clock_seconds=1.5)


def test_results_roundtrip(tmp_path):
    doc = _doc()
    write_results(doc, tmp_path / "r.json")
    back = read_results(tmp_path / "r.json")
    assert back == doc


def test_results_unknown_field_warns(tmp_path):
    d = _doc().to_dict()
    d["extra"] = 1
    (tmp_path / "r.json").write_text(json.dumps(d))
    with pytest.warns(UserWarning, match="extra"):
        read_results(tmp_path / "r.json")


def test_results_missing_field(tmp_path):
    d = _doc().to_dict()
    del d["results"][0]["mean_accuracy"]
    (tmp_path / "r.json").write_text(json.dumps(d))
    with pytest.raises(FormatError, match="mean_accuracy"):
        read_results(tmp_path / "r.json")


def test_results_schema_mismatch(tmp_path):
    d = _doc().to_dict()
    d["schema_version"] = 99
    (tmp_path / "r.json").write_text(json.dumps(d))
    with pytest.raises(FormatError, match="schema"):
        read_results(tmp_path / "r.json")


def test_stable_dict_drops_timing():
    d = _doc().stable_dict()
    assert "created_at" not in d and "wall_clock_seconds" not in d
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        json.dumps(d)


def test_curve_table(rng):
    ds = random_dataset(rng, 3, 20, 2, center=False)
    rows = emit_curve(ds, [MethodConfig("fisher"), MethodConfig("all")], [1, 3], 2, 0.5)
    text = format_curve(rows)
    lines = text.splitlines()
    assert lines[0] == "k\tmethod\tmean\tstd"
    assert [l.split("\t")[1] for l in lines[1:]] == ["all", "all", "fisher", "fisher"]
    assert text == format_curve(emit_curve(ds, [MethodConfig("fisher"), MethodConfig("all")], [1, 3], 2, 0.5))

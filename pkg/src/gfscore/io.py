"""Dataset loaders, results documents and curve tables.

Results are stored as one JSON document per run::

    {
      "schema_version": 1,
      "tool": "gfscore",
      "tool_version": "0.1.0",
      "command": "bench",
      "config": {...},                       # echo of the run configuration
      "results": [                           # one entry per method
        {"method": "gfs", "mean_accuracy": 0.89, "std_accuracy": 0.02,
         "trials": [{"trial_index": 0, "selected_features": [...],
                     "accuracy": 0.9, "gamma_used": 100.0,
                     "trace": [{"m": 1, "termination": "gap",
                                "iterations": [{"t": 1, "theta": ..,
                                                "lower": .., "upper": ..}]}]}]}
      ],
      "created_at": "...",                   # volatile
      "wall_clock_seconds": 1.23             # volatile
    }

Curve tables are tab-separated with the header ``k method mean std``.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .data import DataError, Dataset
from .evaluation import AggregateResult, TrialResult, accuracy_curve

SCHEMA_VERSION = 1
VOLATILE_FIELDS = ("created_at", "wall_clock_seconds")


class FormatError(DataError):
    """Malformed input file."""


def _map_labels(raw: list[str]):
    names: dict[str, int] = {}
    y = [names.setdefault(r, len(names) + 1) for r in raw]
    return np.array(y, dtype=np.int64), tuple(names)


def load_csv(path, label_col=-1) -> Dataset:
    """Read a headed CSV file with one sample per row.

    ``label_col`` is a column name or a (possibly negative) position.
    Labels map to ``1..c`` in order of first appearance; the original
    values are kept in ``Dataset.class_names``.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    width = len(header)
    if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
        if label_col not in header:
            raise FormatError(f"{path}: no column named {label_col!r}")
        li = header.index(label_col)
    else:
        li = int(label_col)
        if not -width <= li < width:
            raise FormatError(f"{path}: label column {li} out of range for {width} columns")
        li %= width
    if width < 2:
        raise FormatError(f"{path}: need at least one feature column and a label column")

    feats, raw_labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise FormatError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        lab = row[li].strip()
        if not lab:
            raise FormatError(f"{path}:{lineno}: missing label")
        try:
            feats.append([float(v) for i, v in enumerate(row) if i != li])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: non-numeric feature value ({exc})") from None
        raw_labels.append(lab)
    if not feats:
        raise FormatError(f"{path}: no data rows")
    y, class_names = _map_labels(raw_labels)
    names = [h for i, h in enumerate(header) if i != li]
    return Dataset(np.array(feats).T, y, names, class_names=class_names)


def load_libsvm(path) -> Dataset:
    """Read ``label idx:val ...`` lines with 1-based ascending indices.

    Absent indices are zero; the feature count is the largest index seen.
    """
    raw_labels, cols = [], []
    d = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            label, *pairs = line.split()
            entries = {}
            last = 0
            for tok in pairs:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: bad entry {tok!r}") from None
                if idx < 1:
                    raise FormatError(f"{path}:{lineno}: index {idx} is not 1-based")
                if idx <= last:
                    raise FormatError(f"{path}:{lineno}: indices must be strictly ascending ({last} then {idx})")
                entries[idx] = val
                last = idx
            d = max(d, last)
            raw_labels.append(label)
            cols.append(entries)
    if not cols:
        raise FormatError(f"{path}: no data lines")
    if d == 0:
        raise FormatError(f"{path}: no feature values")
    X = np.zeros((d, len(cols)))
    for i, entries in enumerate(cols):
        for idx, val in entries.items():
            X[idx - 1, i] = val
    y, class_names = _map_labels(raw_labels)
    return Dataset(X, y, class_names=class_names)


def load_dataset(path, fmt: str | None = None, label_col=-1) -> Dataset:
    if fmt is None:
        fmt = "csv" if str(path).lower().endswith(".csv") else "libsvm"
    if fmt == "csv":
        return load_csv(path, label_col)
    if fmt == "libsvm":
        return load_libsvm(path)
    raise ValueError(f"unknown format {fmt!r}")


def _label_strings(ds: Dataset):
    if ds.class_names is not None:
        return [ds.class_names[k - 1] for k in ds.labels]
    return [str(k) for k in ds.labels]


def write_csv(ds: Dataset, path, label_name: str = "label") -> None:
    names = ds.feature_names or tuple(f"f{j + 1}" for j in range(ds.n_features))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*names, label_name])
        for col, lab in zip(ds.features.T, _label_strings(ds)):
            w.writerow([repr(float(v)) for v in col] + [lab])


def write_libsvm(ds: Dataset, path) -> None:
    """Sparse text output; zeros are omitted and ``repr`` keeps full precision."""
    with open(path, "w") as fh:
        for col, lab in zip(ds.features.T, _label_strings(ds)):
            pairs = " ".join(f"{j + 1}:{float(v)!r}" for j, v in enumerate(col) if v != 0)
            fh.write(f"{lab} {pairs}".rstrip() + "\n")


# ---------------------------------------------------------------------------
# results documents


@dataclass
class ResultsDocument:
    command: str
    config: dict
    results: list[AggregateResult]
    tool: str = "gfscore"
    tool_version: str = ""
    created_at: str = ""
    wall_clock_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool": self.tool,
            "tool_version": self.tool_version,
            "command": self.command,
            "config": self.config,
            "results": [asdict(r) for r in self.results],
            "created_at": self.created_at,
            "wall_clock_seconds": self.wall_clock_seconds,
        }

    def stable_dict(self) -> dict:
        """``to_dict`` without the volatile timing fields."""
        d = self.to_dict()
        for k in VOLATILE_FIELDS:
            d.pop(k)
        return d


_REQUIRED = ("schema_version", "tool", "tool_version", "command", "config", "results")
_AGG_REQUIRED = ("method", "mean_accuracy", "std_accuracy", "trials")
_TRIAL_REQUIRED = ("trial_index", "selected_features", "accuracy")


def _require(d: dict, keys, where: str):
    for k in keys:
        if k not in d:
            raise FormatError(f"{where}: missing required field {k!r}")


def _warn_unknown(d: dict, known, where: str):
    extra = sorted(set(d) - set(known))
    if extra:
        warnings.warn(f"{where}: ignoring unknown field(s) {extra}", stacklevel=3)


def results_from_dict(d: dict) -> ResultsDocument:
    _require(d, _REQUIRED, "results document")
    if d["schema_version"] != SCHEMA_VERSION:
        raise FormatError(f"schema version {d['schema_version']!r} is not supported (expected {SCHEMA_VERSION})")
    _warn_unknown(d, (*_REQUIRED, *VOLATILE_FIELDS), "results document")
    aggs = []
    for i, a in enumerate(d["results"]):
        _require(a, _AGG_REQUIRED, f"results[{i}]")
        _warn_unknown(a, _AGG_REQUIRED, f"results[{i}]")
        trials = []
        for j, t in enumerate(a["trials"]):
            _require(t, _TRIAL_REQUIRED, f"results[{i}].trials[{j}]")
            _warn_unknown(t, (*_TRIAL_REQUIRED, "gamma_used", "trace"), f"results[{i}].trials[{j}]")
            trials.append(
                TrialResult(t["trial_index"], list(t["selected_features"]), t["accuracy"],
                            t.get("gamma_used"), t.get("trace"))
            )
        aggs.append(AggregateResult(a["method"], a["mean_accuracy"], a["std_accuracy"], trials))
    return ResultsDocument(
        command=d["command"],
        config=d["config"],
        results=aggs,
        tool=d["tool"],
        tool_version=d["tool_version"],
        created_at=d.get("created_at", ""),
        wall_clock_seconds=d.get("wall_clock_seconds", 0.0),
        schema_version=d["schema_version"],
    )


def write_results(doc: ResultsDocument, path) -> None:
    Path(path).write_text(json.dumps(doc.to_dict(), indent=2) + "\n")


def read_results(path) -> ResultsDocument:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(d, dict):
        raise FormatError(f"{path}: top level must be an object")
    return results_from_dict(d)


# ---------------------------------------------------------------------------
# curves


def emit_curve(ds: Dataset, methods, ks, num_trials: int, train_frac: float, seed: int = 0) -> list[tuple]:
    """Mean/std 1-NN accuracy per ``(method, k)``, sorted by method then ``k``."""
    return accuracy_curve(ds, methods, ks, num_trials, train_frac, seed)


def format_curve(rows) -> str:
    lines = ["k\tmethod\tmean\tstd"]
    lines += [f"{k}\t{m}\t{mean!r}\t{std!r}" for k, m, mean, std in rows]
    return "\n".join(lines) + "\n"


def write_curve(rows, path) -> None:
    Path(path).write_text(format_curve(rows))

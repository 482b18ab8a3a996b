"""Fetch the UCI ionosphere data set and write it as a headed CSV.

Usage: python scripts/fetch_ionosphere.py [output.csv]

Tries the UCI repository first. When that is unreachable the copy bundled
with the Orange3 wheel (Orange/tests/datasets/ionosphere.tab, same 351 x 34
values) is pulled through pip instead.
"""

import csv
import glob
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/ionosphere/ionosphere.data"


def from_uci():
    with urllib.request.urlopen(UCI_URL, timeout=20) as resp:
        text = resp.read().decode()
    return [line.split(",") for line in text.splitlines() if line.strip()]


def from_orange():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, "Orange3"],
            check=True,
        )
        wheel = glob.glob(f"{tmp}/*.whl")[0]
        text = zipfile.ZipFile(wheel).read("Orange/tests/datasets/ionosphere.tab").decode()
    lines = text.splitlines()[3:]  # name / type / flag header rows
    return [line.split("\t") for line in lines if line.strip()]


def main(out="data/ionosphere.csv"):
    try:
        rows = from_uci()
    except OSError as exc:
        print(f"UCI unreachable ({exc}); falling back to the Orange3 copy", file=sys.stderr)
        rows = from_orange()
    if len(rows) != 351 or any(len(r) != 35 for r in rows):
        sys.exit(f"unexpected shape: {len(rows)} rows")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"a{j}" for j in range(1, 35)] + ["class"])
    w.writerows(rows)
    Path(out).write_text(buf.getvalue())
    print(f"wrote {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])

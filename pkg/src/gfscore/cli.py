"""Command line interface.

Subcommands::

    gfscore select --data D --method gfs --num-features 10
    gfscore bench  --data D --trials 20 --out results.json
    gfscore curve  --data D --method gfs,fisher --num-features 1:20 --out curve.tsv
    gfscore trace  --data D --gamma 100 --m 3

Exit codes: 0 success, 2 configuration error, 3 data error, 4 solver failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .data import DataError, apply_standardizer, fit_standardizer
from .evaluation import DEFAULT_GAMMA_GRID, METHODS, MethodConfig, run_trials, select_features, cross_validate_gamma
from .io import ResultsDocument, emit_curve, format_curve, load_dataset, write_results
from .solver import GfsConfig, SolverError, cutting_plane

EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER = 2, 3, 4
BENCH_METHODS = ("gfs", "fisher", "laplacian", "hsic")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    data: str
    format: str | None
    label_col: str
    methods: list[str]
    num_features: list[int] | None
    gamma: float | None
    gamma_grid: list[float] | None
    trials: int
    train_frac: float
    seed: int
    folds: int
    out: str | None

    def method_configs(self) -> list[MethodConfig]:
        out = []
        for name in self.methods:
            if name == "gfs":
                grid = None if self.gamma is not None else tuple(self.gamma_grid or DEFAULT_GAMMA_GRID)
                out.append(MethodConfig("gfs", gamma=self.gamma, gamma_grid=grid, folds=self.folds))
            else:
                out.append(MethodConfig(name, folds=self.folds))
        return out


def _parse_ks(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(lo, hi + 1, step))
        return [int(p) for p in text.split(",")]
    except (ValueError, IndexError):
        raise ConfigError(f"cannot parse --num-features {text!r}") from None


def _parse_floats(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse gamma grid {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, help="CSV or LibSVM file")
    common.add_argument("--format", choices=("csv", "libsvm"), help="default: by file extension")
    common.add_argument("--label-col", default="-1", help="CSV label column name or position (default: last)")
    common.add_argument("--method", default=None, help="method or comma list: " + ", ".join(METHODS))
    common.add_argument("--num-features", default=None, help="k, comma list, or lo:hi[:step]")
    common.add_argument("--gamma", type=float, default=None)
    common.add_argument("--gamma-grid", default=None, help="comma list, tuned by cross-validation")
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--train-frac", type=float, default=0.5)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--folds", type=int, default=5)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gfscore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("select", parents=[common], help="select features on the whole data set")
    sub.add_parser("bench", parents=[common], help="repeated-split 1-NN benchmark")
    sub.add_parser("curve", parents=[common], help="accuracy against number of selected features")
    tr = sub.add_parser("trace", parents=[common], help="dump cutting-plane bounds per iteration")
    tr.add_argument("--m", type=int, default=1, help="features per constraint")
    return parser


def _run_config(args, default_methods) -> RunConfig:
    methods = args.method.split(",") if args.method else list(default_methods)
    methods = [m.strip() for m in methods]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    if args.gamma is not None and args.gamma_grid is not None:
        raise ConfigError("give either --gamma or --gamma-grid, not both")
    ks = _parse_ks(args.num_features)
    if ks is not None and min(ks) < 1:
        raise ConfigError("--num-features must be >= 1")
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if not 0 < args.train_frac < 1:
        raise ConfigError("--train-frac must lie in (0, 1)")
    if args.gamma is not None and args.gamma <= 0:
        raise ConfigError("--gamma must be positive")
    grid = _parse_floats(args.gamma_grid)
    if grid is not None and (not grid or min(grid) <= 0):
        raise ConfigError("--gamma-grid must hold positive values")
    return RunConfig(args.data, args.format, args.label_col, methods, ks, args.gamma, grid,
                     args.trials, args.train_frac, args.seed, args.folds, args.out)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_select(cfg: RunConfig, ds) -> None:
    if len(cfg.methods) != 1:
        raise ConfigError("select takes exactly one --method")
    k = (cfg.num_features or [max(1, ds.n_features // 2)])[0]
    if k > ds.n_features:
        raise ConfigError(f"--num-features {k} exceeds {ds.n_features} features")
    method = cfg.method_configs()[0]
    ds = apply_standardizer(fit_standardizer(ds), ds)
    gamma = method.gamma
    if method.name == "gfs" and gamma is None:
        gamma = cross_validate_gamma(ds, method.gamma_grid, method.folds, method, k, seed=cfg.seed)
    idx, _ = select_features(ds, method, k, gamma=gamma)
    names = ds.feature_names or tuple(f"f{j + 1}" for j in range(ds.n_features))
    lines = [f"# method={method.name} k={k}" + (f" gamma={gamma!r}" if gamma is not None else "")]
    lines += [f"{j}\t{names[j]}" for j in idx]
    _emit("\n".join(lines) + "\n", cfg.out)


def _cmd_bench(cfg: RunConfig, ds, command="bench") -> ResultsDocument:
    k = (cfg.num_features or [max(1, ds.n_features // 2)])[0]
    if k > ds.n_features:
        raise ConfigError(f"--num-features {k} exceeds {ds.n_features} features")
    start = time.perf_counter()
    results = [
        run_trials(ds, m, cfg.trials, cfg.train_frac, k, cfg.seed, keep_trace=(m.name == "gfs"))
        for m in cfg.method_configs()
    ]
    config = asdict(cfg)
    config["num_features"] = [k]
    doc = ResultsDocument(
        command=command,
        config=config,
        results=results,
        tool_version=__version__,
        created_at=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        wall_clock_seconds=time.perf_counter() - start,
    )
    if cfg.out is not None:
        write_results(doc, cfg.out)
    width = max(len(r.method) for r in results)
    lines = [f"{'method':<{width}}  accuracy (%)   k={k}, {cfg.trials} trials"]
    lines += [f"{r.method:<{width}}  {100 * r.mean_accuracy:.2f}±{100 * r.std_accuracy:.2f}" for r in results]
    print("\n".join(lines))
    return doc


def _cmd_curve(cfg: RunConfig, ds) -> None:
    ks = cfg.num_features or list(range(1, ds.n_features + 1))
    if max(ks) > ds.n_features:
        raise ConfigError(f"--num-features exceeds {ds.n_features} features")
    rows = emit_curve(ds, cfg.method_configs(), ks, cfg.trials, cfg.train_frac, cfg.seed)
    _emit(format_curve(rows), cfg.out)


def _cmd_trace(cfg: RunConfig, ds, m: int) -> None:
    if m < 1 or m > ds.n_features:
        raise ConfigError(f"--m must lie in [1, {ds.n_features}]")
    gamma = cfg.gamma if cfg.gamma is not None else (cfg.gamma_grid or [100.0])[0]
    ds = apply_standardizer(fit_standardizer(ds), ds)
    res = cutting_plane(ds, GfsConfig(gamma=gamma, m=m))
    lines = ["t\tconstraint\ttheta\tlower\tupper\tinner_iterations\tinner_objective"]
    for e in res.trace.entries:
        lines.append(
            f"{e.iteration}\t{','.join(map(str, e.constraint))}\t{e.theta!r}\t{e.lower!r}\t{e.upper!r}"
            f"\t{e.inner_iterations}\t{e.inner_objective!r}"
        )
    lines.append(f"# termination={res.trace.termination} selected={json.dumps(res.selected.tolist())}")
    _emit("\n".join(lines) + "\n", cfg.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        defaults = BENCH_METHODS if args.command in ("bench", "curve") else ("gfs",)
        cfg = _run_config(args, defaults)
    except (ConfigError, ValueError) as exc:
        print(f"gfscore: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        label_col = cfg.label_col
        ds = load_dataset(cfg.data, cfg.format, label_col)
    except (DataError, OSError) as exc:
        print(f"gfscore: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        if args.command == "select":
            _cmd_select(cfg, ds)
        elif args.command == "bench":
            _cmd_bench(cfg, ds)
        elif args.command == "curve":
            _cmd_curve(cfg, ds)
        else:
            _cmd_trace(cfg, ds, args.m)
    except SolverError as exc:
        print(f"gfscore: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DataError as exc:
        print(f"gfscore: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValueError) as exc:
        print(f"gfscore: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except np.linalg.LinAlgError as exc:
        print(f"gfscore: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness: run every policy of a configuration and write CSVs.

Command line::

    onlinebb run CONFIG [--out DIR] [--jobs N] [--quiet]
    onlinebb validate CONFIG
    onlinebb plot-data RUN_DIR --out FILE [--decimation N]

Exit codes: 0 success, 1 validation failure, 2 numerical failure, 3 I/O failure.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import csvio
from .config import load_config, serialize
from .errors import ConfigError, InvalidArgument, NumericalFailure
from .learner import run
from .losses import max_gradient_norm
from .regret import regret_report

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

SUMMARY_HEADER = ["policy", "R_K", "avg_R_K", "slope", "zinkevich_bound", "psi", "zeta",
                  "cond_t1", "flag_P", "degenerate_rounds", "wall_ms"]
CHECKPOINT_HEADER = ["policy", "k", "regret", "avg_regret"]


@dataclass
class PolicyResult:
    name: str
    trajectory: object = None
    report: object = None
    wall_ms: float = math.nan
    error: str = ""


@dataclass
class MatrixResult:
    out_dir: Path
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def run_policy(config, i):
    """Run policy ``i`` of ``config``; numerical failures are captured, not raised."""
    name = config.policies[i]["name"]
    t0 = time.perf_counter()
    try:
        seq = config.build_sequence()
        fset = config.build_set()
        gmax = max_gradient_norm(seq, fset) if config.policies[i]["alpha0"] == "auto" else None
        policy = config.build_policy(i, fset.diameter(), gmax)
        traj = run(seq, policy, fset, config.build_x0(fset), config.K)
        report = regret_report(traj, seq, fset, label=name)
    except (NumericalFailure, InvalidArgument) as exc:
        return PolicyResult(name, error=f"{type(exc).__name__}: {exc}")
    return PolicyResult(name, traj, report, (time.perf_counter() - t0) * 1e3)


def summary_row(res):
    rep = res.report
    block = csvio.summary_block(rep)
    R_K, avg_R_K, zb, psi, zeta, cond, flag_p, slope = block
    return [res.name, R_K, avg_R_K, slope, zb, psi, zeta, cond, flag_p,
            int(np.count_nonzero(res.trajectory.degenerate)), int(round(res.wall_ms))]


def run_matrix(config, out_dir=None, jobs=1, log=None):
    """Execute all policies of ``config`` and write their outputs.

    Results are collected in configuration order whatever the completion
    order, so serial and parallel execution write identical files.
    """
    out = Path(out_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(serialize(config) + "\n", encoding="utf-8")

    idx = range(len(config.policies))
    if jobs > 1 and len(config.policies) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_policy, [config] * len(idx), idx))
    else:
        results = [run_policy(config, i) for i in idx]

    matrix = MatrixResult(out, results=results)
    checkpoint_rows = []
    for res in results:
        if res.error:
            matrix.failures.append((res.name, res.error))
            if log:
                log(f"run {res.name!r} failed: {res.error}")
            continue
        csvio.write_trajectory(res.trajectory, out / f"trajectory_{res.name}.csv")
        csvio.write_regret(res.report, out / f"regret_{res.name}.csv")
        matrix.rows.append(summary_row(res))
        for k in config.checkpoints:
            checkpoint_rows.append([res.name, k, res.report.regret[k - 1], res.report.avg_regret[k - 1]])
        if log:
            log(f"{res.name}: R_K={res.report.R_K:.6g} avg={res.report.avg_R_K:.3g} "
                f"slope={res.report.slope:.3f} ({res.wall_ms:.0f} ms)")
    csvio._write(out / "summary.csv", SUMMARY_HEADER, matrix.rows)
    csvio._write(out / "checkpoints.csv", CHECKPOINT_HEADER, checkpoint_rows)
    return matrix


def load_curves(run_dir):
    """(policy, regret curve) pairs of a finished run, in summary order."""
    run_dir = Path(run_dir)
    with (run_dir / "summary.csv").open(encoding="utf-8", newline="") as fh:
        names = [row["policy"] for row in csv.DictReader(fh)]
    return [(n, csvio.read_regret(run_dir / f"regret_{n}.csv")) for n in names]


def _err(msg):
    print(msg, file=sys.stderr)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="onlinebb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run every policy of a configuration")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (overrides the config)")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--quiet", action="store_true")
    p_val = sub.add_parser("validate", help="check a configuration and print it with defaults")
    p_val.add_argument("config")
    p_plot = sub.add_parser("plot-data", help="long-format regret CSV for plotting")
    p_plot.add_argument("run_dir")
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--decimation", type=int, default=None,
                        help="keep every N-th round (default: 100 log-spaced rounds)")
    args = parser.parse_args(argv)

    if args.command == "plot-data":
        try:
            curves = load_curves(args.run_dir)
            saved = Path(args.run_dir) / "config.json"
            points = json.loads(saved.read_text(encoding="utf-8")).get("plot_points", 100) if saved.exists() else 100
            csvio.write_plot_data(curves, args.out, decimation=args.decimation, points=points)
        except InvalidArgument as exc:
            _err(f"error: {exc}")
            return EXIT_VALIDATION
        except (OSError, KeyError, ValueError) as exc:
            _err(f"error: {exc}")
            return EXIT_IO
        return EXIT_OK

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        _err(f"invalid configuration: {exc}")
        return EXIT_VALIDATION
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO

    if args.command == "validate":
        print(serialize(config))
        return EXIT_OK

    try:
        matrix = run_matrix(config, args.out, max(1, args.jobs), log=None if args.quiet else _err)
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO
    if not matrix.ok:
        for name, msg in matrix.failures:
            _err(f"numerical failure in run {name!r}: {msg}")
        return EXIT_NUMERICAL
    if not args.quiet:
        print(json.dumps({"out_dir": str(matrix.out_dir), "runs": len(matrix.rows)}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

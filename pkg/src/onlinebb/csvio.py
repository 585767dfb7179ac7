"""CSV writers and readers for trajectories, regret curves and plot data.

UTF-8, comma separated, one header row, floats at 17 significant digits.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

TRAJECTORY_TAIL = ["loss", "grad_norm", "alpha", "degenerate", "projected"]
REGRET_HEADER = ["k", "regret", "avg_regret", "lin_regret"]
SUMMARY_BLOCK_HEADER = ["R_K", "avg_R_K", "zinkevich_bound", "psi", "zeta", "cond_t1", "flag_P", "slope"]
PLOT_HEADER = ["policy", "k", "regret", "avg_regret"]


def fmt(value):
    if value is None:
        return "na"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return "%.17g" % v


def _write(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return path


def write_trajectory(traj, path):
    header = ["k"] + [f"x_{i + 1}" for i in range(traj.dim)] + TRAJECTORY_TAIL
    gnorm = np.linalg.norm(traj.gradients, axis=1)
    rows = (
        [k + 1, *traj.iterates[k], traj.losses[k], gnorm[k], traj.alphas[k],
         int(traj.degenerate[k]), int(traj.projected[k])]
        for k in range(traj.K)
    )
    return _write(path, header, rows)


def write_regret(report, path):
    k = np.arange(1, report.K + 1)
    rows = zip(k, report.regret, report.avg_regret, report.lin_regret)
    return _write(path, REGRET_HEADER, rows)


def summary_block(report):
    t1, t2 = report.theorem1, report.theorem2
    return [
        report.R_K,
        report.avg_R_K,
        report.zinkevich,
        t1.psi if t1 else math.nan,
        t2.zeta if t2 else math.nan,
        t1.condition_t1 if t1 else None,
        t1.flag_P if t1 else None,
        report.slope,
    ]


def write_regret_summary(report, path):
    """The single-row summary block that accompanies a regret curve."""
    return _write(path, SUMMARY_BLOCK_HEADER, [summary_block(report)])


def read_regret(path):
    """Return the regret column of a regret CSV as an array indexed by k - 1."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["regret"]) for r in rows])


def plot_rounds(K, decimation=None, points=100):
    """Rounds kept in plot data: every ``decimation``-th round, or ``points``
    log-spaced rounds (duplicates merged) when no stride is given."""
    if decimation is not None:
        if decimation < 1:
            raise InvalidArgument("decimation must be >= 1")
        return np.arange(decimation, K + 1, decimation)
    return np.unique(np.rint(np.geomspace(1, K, num=min(points, K))).astype(int))


def write_plot_data(curves, path, decimation=None, points=100):
    """``curves`` is a sequence of (policy, regret array) pairs."""
    curves = list(curves)
    if not curves:
        raise InvalidArgument("need at least one regret curve")
    rows = []
    for name, regret in curves:
        regret = np.asarray(regret, dtype=float)
        for k in plot_rounds(regret.size, decimation, points):
            rows.append([name, int(k), regret[k - 1], regret[k - 1] / k])
    return _write(path, PLOT_HEADER, rows)


def emit_plot_data(reports, path, decimation=None, points=100):
    return write_plot_data([(r.label, r.regret) for r in reports], path, decimation, points)

"""Trajectory CSV and per-iteration JSONL output."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .bundle import Trajectory
from .errors import DimensionError

PLOT_KEYS = ("iter", "cost", "max_violation", "slack_l1", "objective", "ms")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def trajectory_header(n_x: int, n_u: int) -> list[str]:
    return ["k"] + [f"x_{i}" for i in range(n_x)] + [f"u_{j}" for j in range(n_u)]


def export_trajectory(traj: Trajectory, path: str | Path) -> None:
    """Write one row per knot; the final row leaves the control cells blank."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(traj.n_x, traj.n_u))
        for k in range(traj.N):
            u = [_fmt(v) for v in traj.controls[k]] if k < traj.N - 1 else [""] * traj.n_u
            w.writerow([str(k)] + [_fmt(v) for v in traj.states[k]] + u)


def import_trajectory(path: str | Path) -> Trajectory:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trajectory file")
    header, body = rows[0], rows[1:]
    n_x = sum(1 for h in header if h.startswith("x_"))
    n_u = sum(1 for h in header if h.startswith("u_"))
    if header != trajectory_header(n_x, n_u):
        raise ValueError(f"{path}: unexpected header {header}")
    if len(body) < 2:
        raise ValueError(f"{path}: need at least two knots, found {len(body)}")
    X = np.empty((len(body), n_x))
    U = np.empty((len(body) - 1, n_u))
    for k, row in enumerate(body):
        if len(row) != 1 + n_x + n_u:
            raise DimensionError(f"{path}: row {k + 1} column count", 1 + n_x + n_u, len(row))
        if int(row[0]) != k:
            raise ValueError(f"{path}: row {k + 1} has knot index {row[0]}, expected {k}")
        X[k] = [float(v) for v in row[1 : 1 + n_x]]
        cells = row[1 + n_x :]
        if k < len(body) - 1:
            U[k] = [float(v) for v in cells]
        elif any(c != "" for c in cells):
            raise ValueError(f"{path}: final row must leave control cells blank")
    return Trajectory(X, U)


def iteration_plot_records(report) -> list[dict]:
    return [
        {
            "iter": r.iteration,
            "cost": r.cost,
            "max_violation": r.max_violation,
            "slack_l1": r.slack_l1,
            "objective": r.objective,
            "ms": r.wall_ms,
        }
        for r in report.records
    ]


def export_iteration_plotdata(report, path: str | Path) -> None:
    """One JSON object per executed iteration, keys as in ``PLOT_KEYS``."""
    write_jsonl(iteration_plot_records(report), path)


def write_jsonl(records, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    with Path(path).open() as fh:
        return [json.loads(line) for line in fh if line.strip()]

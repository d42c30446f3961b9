"""Command-line front end.

    trajbundle solve CONFIG [--out DIR] [--seed N] [--workers K]
                            [--max-iter N] [--tol X] [--log-level L]
    trajbundle validate CONFIG
    trajbundle list-problems

Exit codes: 0 converged (or completed, for the sampling modes), 2 ran but did
not converge, 1 error. The default worker count comes from ``TBM_WORKERS``
when neither the command line nor the config sets it.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .config import MppiSection, RunConfig, load_config, parse_config
from .errors import ConfigError, TrajBundleError
from .mppi import ControlPolicy, mpc_run, mppi_update, rollout
from .problems import REGISTRY
from .scp import tbm_solve, violation_parts

log = logging.getLogger("trajbundle")

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2
WORKERS_ENV = "TBM_WORKERS"


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _apply_overrides(data: dict, args) -> dict:
    """Fold command-line overrides into the raw config so validation names fields."""
    data = json.loads(json.dumps(data))
    if args.seed is not None:
        data["seed"] = args.seed
    if args.workers is not None:
        data["workers"] = args.workers
    if args.out is not None:
        data["output_dir"] = args.out
    mode = data.get("mode", "tbm")
    if args.max_iter is not None:
        if mode == "tbm":
            data.setdefault("tbm", {})["max_iterations"] = args.max_iter
        else:
            key = "iterations" if mode == "mppi" else "steps"
            data.setdefault("mppi", {})[key] = args.max_iter
    if args.tol is not None:
        if mode != "tbm":
            raise ConfigError("--tol applies to mode 'tbm' only")
        data.setdefault("tbm", {})["tol_violation"] = args.tol
    return data


def resolve_workers(cfg: RunConfig) -> int:
    if cfg.workers is not None:
        return cfg.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            k = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}: expected a positive integer, got {env!r}") from None
        if k < 1:
            raise ConfigError(f"{WORKERS_ENV}: expected a positive integer, got {env!r}")
        return k
    return 1


def _write_summary(out: Path, summary: dict) -> None:
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _path_violation(traj, problem) -> float | None:
    if traj.N != problem.N:
        return None
    return max(violation_parts(traj, problem))


def run_tbm(cfg: RunConfig, problem, workers: int, out: Path) -> int:
    tcfg = cfg.tbm_config(problem, workers=workers)
    report = tbm_solve(problem, cfg=tcfg)
    if report.records:
        io.export_trajectory(report.trajectory, out / "trajectory.csv")
    io.export_iteration_plotdata(report, out / "iterations.jsonl")
    summary = {"problem": problem.name, "mode": "tbm", "seed": cfg.seed, **report.summary()}
    _write_summary(out, summary)
    if report.failure:
        log.error("%s", report.failure)
        return EXIT_ERROR
    log.info("converged=%s after %d iterations", report.converged, report.iterations)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def run_mppi(cfg: RunConfig, problem, workers: int, out: Path) -> int:
    """Repeated sampling updates of one open-loop plan over the full horizon."""
    mcfg = cfg.mppi_config(problem, workers=workers)
    iterations = (cfg.mppi or MppiSection()).iterations
    pol = ControlPolicy(np.zeros((mcfg.horizon, problem.n_u)))
    records = []
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for it in range(1, iterations + 1):
            t0 = time.perf_counter()
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, it]))
            pol, diag = mppi_update(pol, problem.x_init, problem, mcfg, rng=rng, executor=pool)
            traj, cost = rollout(pol, problem.x_init, problem)
            records.append(
                {
                    "iter": it,
                    "cost": cost,
                    "max_violation": _path_violation(traj, problem),
                    "slack_l1": None,
                    "objective": diag.cost_min,
                    "ms": (time.perf_counter() - t0) * 1e3,
                    "ess": diag.ess,
                }
            )
    finally:
        if pool is not None:
            pool.shutdown()
    io.export_trajectory(traj, out / "trajectory.csv")
    io.write_jsonl(records, out / "iterations.jsonl")
    _write_summary(
        out,
        {
            "problem": problem.name,
            "mode": "mppi",
            "seed": cfg.seed,
            "converged": None,
            "iterations": iterations,
            "final_cost": cost,
            "final_violation": records[-1]["max_violation"],
            "failure": None,
        },
    )
    return EXIT_OK


def run_mpc(cfg: RunConfig, problem, workers: int, out: Path) -> int:
    mcfg = cfg.mppi_config(problem, workers=workers)
    steps = (cfg.mppi or MppiSection()).steps
    res = mpc_run(problem, problem.x_init, mcfg, steps)
    io.export_trajectory(res.trajectory, out / "trajectory.csv")
    io.write_jsonl([{"iter": t + 1, **d.to_json()} for t, d in enumerate(res.diagnostics)], out / "iterations.jsonl")
    _write_summary(
        out,
        {
            "problem": problem.name,
            "mode": "mpc",
            "seed": cfg.seed,
            "converged": None,
            "iterations": steps,
            "final_state": res.trajectory.states[-1].tolist(),
            "failure": None,
        },
    )
    return EXIT_OK


RUNNERS = {"tbm": run_tbm, "mppi": run_mppi, "mpc": run_mpc}


def cmd_solve(args) -> int:
    cfg = parse_config(_apply_overrides(_read_json(args.config), args))
    workers = resolve_workers(cfg)
    problem = cfg.build_problem()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    log.info("solving %s (mode %s, seed %d, workers %d) -> %s", problem.name, cfg.mode, cfg.seed, workers, out)
    return RUNNERS[cfg.mode](cfg, problem, workers, out)


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.build_problem()
    if cfg.mode == "tbm":
        cfg.tbm_config(problem)
    else:
        cfg.mppi_config(problem)
    print(f"{args.config}: ok ({problem.name}, mode {cfg.mode})")
    return EXIT_OK


def cmd_list(args) -> int:
    for name, (_, desc) in sorted(REGISTRY.items()):
        print(f"{name:20s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trajbundle", description="Derivative-free trajectory optimization by sample bundles.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="run a configuration")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (overrides output_dir)")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--max-iter", type=int, dest="max_iter")
    s.add_argument("--tol", type=float)
    s.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    s.set_defaults(func=cmd_solve)
    v = sub.add_parser("validate", help="check a configuration without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    ls = sub.add_parser("list-problems", help="show the problem registry")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(args, "log_level", "WARNING"), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (TrajBundleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

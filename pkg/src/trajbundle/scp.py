"""Outer trajectory-bundle loop.

Each iteration samples every knot around the current iterate, evaluates the
problem on all samples, solves the bundled QP and replaces the iterate with the
interpolated solution. The loop ends when the nonlinear constraint violation
of the iterate drops below ``tol_violation``.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bundle import KnotBundle, SimplexWeights, Trajectory, assemble_bundle, interpolated_trajectory, project_simplex
from .errors import DimensionError, EvaluatorError
from .problems.base import ProblemDefinition
from .sampling import SamplerConfig, TrustRegion, knot_rng, sample_knot, sample_terminal_knot
from .subproblem import DEFAULT_MU, NUMERICAL_FAILURE, QPBackend, solve, transcribe

log = logging.getLogger(__name__)


@dataclass
class TbmConfig:
    mu: float = DEFAULT_MU
    trust_region: Optional[TrustRegion] = None  # None: the problem's default
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    tol_violation: float = 1e-4
    max_iterations: int = 500
    tr_shrink_factor: float = 0.5
    tr_shrink_on_increase: bool = False
    # shrink when the subproblem predicts a violation below mismatch_ratio
    # times the one actually observed (the bundle model is too coarse)
    tr_shrink_on_mismatch: bool = False
    mismatch_ratio: float = 0.5
    tr_min_scale: float = 0.0
    workers: int = 1
    qp_tol: float = 1e-8
    qp_max_iter: Optional[int] = None
    qp_backend: str = "ipm"
    log_path: Optional[str] = None
    keep_iterates: bool = False

    def __post_init__(self):
        if not self.tol_violation > 0:
            raise ValueError(f"tol_violation must be > 0, got {self.tol_violation}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0 < self.tr_shrink_factor <= 1:
            raise ValueError(f"tr_shrink_factor must lie in (0, 1], got {self.tr_shrink_factor}")
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0 < self.mismatch_ratio < 1:
            raise ValueError(f"mismatch_ratio must lie in (0, 1), got {self.mismatch_ratio}")
        if not 0 <= self.tr_min_scale <= 1:
            raise ValueError(f"tr_min_scale must lie in [0, 1], got {self.tr_min_scale}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def default_config(problem: ProblemDefinition, **overrides) -> TbmConfig:
    """TbmConfig seeded with the problem's recommended settings, then ``overrides``."""
    return TbmConfig(**{**problem.solver_defaults, **overrides})


@dataclass
class IterationRecord:
    iteration: int
    cost: float
    max_defect: float
    max_ineq_violation: float
    max_violation: float
    dyn_slack_l1: float
    ineq_slack_l1: float
    objective: float
    solver_status: str
    solver_iterations: int
    tr_scale: float
    wall_ms: float
    predicted_violation: float = 0.0

    @property
    def slack_l1(self) -> float:
        return self.dyn_slack_l1 + self.ineq_slack_l1

    def to_json(self) -> dict:
        d = asdict(self)
        d["slack_l1"] = self.slack_l1
        return d


@dataclass
class SolveReport:
    records: list
    trajectory: Trajectory
    converged: bool
    failure: Optional[str] = None
    iterates: list = field(default_factory=list)
    trust_regions: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_violation(self) -> float:
        return self.records[-1].max_violation if self.records else float("inf")

    def summary(self) -> dict:
        last = self.records[-1] if self.records else None
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_violation": None if last is None else last.max_violation,
            "final_cost": None if last is None else last.cost,
            "failure": self.failure,
        }


def _inf(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def violation_parts(traj: Trajectory, problem: ProblemDefinition) -> tuple[float, float]:
    """``(max dynamics defect inf-norm, max path-constraint violation)``."""
    if traj.n_x != problem.n_x or traj.n_u != problem.n_u or traj.N != problem.N:
        raise DimensionError(
            "trajectory (N, n_x, n_u)", (problem.N, problem.n_x, problem.n_u), (traj.N, traj.n_x, traj.n_u)
        )
    defect = 0.0
    ineq = 0.0
    for k in range(traj.N - 1):
        x, u = traj.states[k], traj.controls[k]
        try:
            fx = np.asarray(problem.dynamics(x, u), dtype=float)
            c = np.asarray(problem.constraint(x, u, k), dtype=float) if problem.n_c else np.zeros(0)
        except Exception as exc:  # evaluator failures carry the knot
            raise EvaluatorError("dynamics/constraint", k, detail=str(exc)) from exc
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(c))):
            raise EvaluatorError("dynamics/constraint", k, detail="non-finite output")
        defect = max(defect, float(np.max(np.abs(traj.states[k + 1] - fx))))
        if c.size:
            ineq = max(ineq, float(np.max(-c)))
    return defect, max(ineq, 0.0)


def violation(traj: Trajectory, problem: ProblemDefinition) -> float:
    return max(violation_parts(traj, problem))


def _knot_bundle(problem, iterate, tr, sampler, iteration, k, executor=None) -> KnotBundle:
    rng = knot_rng(sampler.rng_seed, iteration, k) if sampler.scheme != "coordinate" else None
    if k == problem.N - 1:
        X = sample_terminal_knot(iterate.states[k], tr, sampler, rng=rng)
        return assemble_bundle(X, None, problem, k, executor)
    X, U = sample_knot(iterate.states[k], iterate.controls[k], tr, sampler, pin_state=(k == 0), rng=rng)
    return assemble_bundle(X, U, problem, k, executor)


def build_bundles(problem, iterate, tr, sampler, iteration: int, executor=None) -> list:
    ks = range(problem.N)
    if executor is None:
        return [_knot_bundle(problem, iterate, tr, sampler, iteration, k) for k in ks]
    return list(executor.map(lambda k: _knot_bundle(problem, iterate, tr, sampler, iteration, k), ks))


def _validate_guess(problem: ProblemDefinition, guess: Trajectory) -> None:
    if (guess.N, guess.n_x, guess.n_u) != (problem.N, problem.n_x, problem.n_u):
        raise DimensionError(
            "initial guess (N, n_x, n_u)", (problem.N, problem.n_x, problem.n_u), (guess.N, guess.n_x, guess.n_u)
        )
    if not np.allclose(guess.states[0], problem.x_init, rtol=0, atol=1e-12):
        raise ValueError("initial guess must start at the problem's initial condition")


def tbm_solve(
    problem: ProblemDefinition,
    initial_guess: Trajectory | None = None,
    cfg: TbmConfig | None = None,
    backend: QPBackend | None = None,
) -> SolveReport:
    """Run the bundle iteration from ``initial_guess`` (problem default if None)."""
    cfg = cfg or TbmConfig()
    iterate = problem.initial_guess() if initial_guess is None else initial_guess
    _validate_guess(problem, iterate)
    tr = cfg.trust_region or problem.trust_region
    if tr is None:
        raise ValueError("no trust region: set TbmConfig.trust_region or the problem default")
    base_tr = tr
    scale = 1.0
    prev_viol = violation(iterate, problem)

    records: list = []
    iterates = [iterate] if cfg.keep_iterates else []
    trs: list = []
    converged = False
    failure = None
    log_fh = open(cfg.log_path, "w") if cfg.log_path else None
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for it in range(1, cfg.max_iterations + 1):
            t0 = time.perf_counter()
            bundles = build_bundles(problem, iterate, tr, cfg.sampler, it, pool)
            sp_ = transcribe(bundles, cfg.mu, problem.x_init)
            sol = solve(sp_, cfg.qp_tol, cfg.qp_max_iter, backend or cfg.qp_backend)
            if sol.solver_status == NUMERICAL_FAILURE:
                failure = f"subproblem numerical failure at iteration {it}: {sol.qp.message if sol.qp else ''}"
                log.error(failure)
                break
            weights = [SimplexWeights(project_simplex(w.alpha)) for w in sol.weights]
            new = interpolated_trajectory(bundles, weights)
            states = np.array(new.states)
            states[0] = problem.x_init
            new = new.copy_with(states=states)

            defect, ineq = violation_parts(new, problem)
            viol = max(defect, ineq)
            predicted = max(_inf(sol.dyn_slack), _inf(sol.ineq_slack))
            rec = IterationRecord(
                iteration=it,
                cost=problem.cost(new),
                max_defect=defect,
                max_ineq_violation=ineq,
                max_violation=viol,
                dyn_slack_l1=sol.dyn_slack_l1,
                ineq_slack_l1=sol.ineq_slack_l1,
                objective=sol.objective,
                solver_status=sol.solver_status,
                solver_iterations=sol.iterations,
                tr_scale=scale,
                wall_ms=(time.perf_counter() - t0) * 1e3,
                predicted_violation=predicted,
            )
            records.append(rec)
            trs.append(tr)
            if log_fh:
                log_fh.write(json.dumps(rec.to_json()) + "\n")
                log_fh.flush()
            log.debug("iter %d viol %.3e cost %.6g", it, viol, rec.cost)

            shrink = cfg.tr_shrink_on_increase and viol > prev_viol
            if cfg.tr_shrink_on_mismatch and viol >= cfg.tol_violation:
                shrink = shrink or predicted < cfg.mismatch_ratio * viol
            if shrink and scale * cfg.tr_shrink_factor >= cfg.tr_min_scale:
                scale *= cfg.tr_shrink_factor
                tr = base_tr.scaled(scale)
            iterate = new
            prev_viol = viol
            if cfg.keep_iterates:
                iterates.append(iterate)
            if viol < cfg.tol_violation:
                converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()
        if log_fh:
            log_fh.close()
    return SolveReport(records, iterate, converged, failure, iterates, trs)

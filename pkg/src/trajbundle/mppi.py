"""Sampling-based single-shooting control.

Each update perturbs a nominal control sequence with Gaussian noise, rolls
every sample out through the dynamics and averages the samples with the
weights that minimize ``J'a + lam * sum(a log a)`` over the simplex. That is
the same entropy-regularized weight solve used by the bundle code, so
``lam > 0`` gives softmax weights and ``lam == 0`` picks the cheapest sample.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bundle import Trajectory
from .errors import DimensionError, TrajBundleError
from .problems.base import ProblemDefinition
from .subproblem import solve_entropy_regularized

log = logging.getLogger(__name__)

SHIFT_FILLS = ("repeat_last", "zero")


@dataclass(frozen=True)
class ControlPolicy:
    controls: np.ndarray  # (H, n_u)

    def __post_init__(self):
        U = np.array(self.controls, dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        if U.ndim != 2 or U.shape[0] < 1:
            raise DimensionError("policy controls", "(H, n_u) with H >= 1", U.shape)
        U.setflags(write=False)
        object.__setattr__(self, "controls", U)

    @property
    def horizon(self) -> int:
        return self.controls.shape[0]

    @property
    def n_u(self) -> int:
        return self.controls.shape[1]

    def shifted(self, fill: str = "repeat_last") -> "ControlPolicy":
        """Drop the first control and append one at the end."""
        if fill not in SHIFT_FILLS:
            raise ValueError(f"shift_fill must be one of {SHIFT_FILLS}, got {fill!r}")
        tail = self.controls[-1] if fill == "repeat_last" else np.zeros(self.n_u)
        return ControlPolicy(np.vstack([self.controls[1:], tail]))


@dataclass
class MppiConfig:
    lam: float = 1.0
    m_samples: int = 64
    noise_sigma: np.ndarray | float = 1.0
    horizon: int = 20
    rng_seed: int = 0
    shift_fill: str = "repeat_last"
    workers: int = 1

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.m_samples < 1:
            raise ValueError(f"m_samples must be >= 1, got {self.m_samples}")
        sig = np.atleast_1d(np.asarray(self.noise_sigma, dtype=float))
        if not np.all(sig > 0):
            raise ValueError(f"noise_sigma entries must be > 0, got {sig}")
        self.noise_sigma = sig
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.shift_fill not in SHIFT_FILLS:
            raise ValueError(f"shift_fill must be one of {SHIFT_FILLS}, got {self.shift_fill!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass
class MppiDiagnostics:
    costs: np.ndarray
    weights: np.ndarray
    best_index: int
    n_finite: int
    ess: float

    @property
    def cost_min(self) -> float:
        return float(self.costs.min())

    @property
    def cost_mean(self) -> float:
        f = self.costs[np.isfinite(self.costs)]
        return float(f.mean()) if f.size else float("inf")

    def to_json(self) -> dict:
        return {
            "cost_min": self.cost_min,
            "cost_mean": self.cost_mean,
            "cost_max": float(self.costs[np.isfinite(self.costs)].max()) if self.n_finite else None,
            "best_index": self.best_index,
            "n_finite": self.n_finite,
            "ess": self.ess,
        }


def rollout(policy: ControlPolicy, x0, problem: ProblemDefinition) -> tuple[Trajectory, float]:
    """Forward-simulate ``policy`` from ``x0`` and evaluate the problem cost.

    Residuals are indexed by the step within the policy horizon. A non-finite
    state or cost makes the returned cost ``+inf``.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n_x,):
        raise DimensionError("rollout x0", (problem.n_x,), x0.shape)
    if policy.n_u != problem.n_u:
        raise DimensionError("policy n_u", problem.n_u, policy.n_u)
    H = policy.horizon
    X = np.empty((H + 1, problem.n_x))
    X[0] = x0
    cost = 0.0
    with np.errstate(all="ignore"):
        for k in range(H):
            u = policy.controls[k]
            r = np.asarray(problem.residual(X[k], u, k), dtype=float)
            cost += float(r @ r)
            X[k + 1] = problem.dynamics(X[k], u)
        rN = np.asarray(problem.terminal_residual(X[H]), dtype=float)
        cost += float(rN @ rN)
    if not (np.isfinite(cost) and np.all(np.isfinite(X))):
        log.debug("rollout produced non-finite values; sample discarded")
        cost = float("inf")
    return Trajectory(X, np.array(policy.controls)), cost


def _sample_policies(nominal: ControlPolicy, cfg: MppiConfig, rng: np.random.Generator) -> np.ndarray:
    m, H, n_u = cfg.m_samples, nominal.horizon, nominal.n_u
    sig = np.broadcast_to(cfg.noise_sigma, (n_u,))
    U = np.empty((m, H, n_u))
    U[:-1] = nominal.controls + sig * rng.standard_normal((m - 1, H, n_u))
    U[-1] = nominal.controls
    return U


def mppi_update(
    nominal: ControlPolicy,
    x0,
    problem: ProblemDefinition,
    cfg: MppiConfig,
    rng: Optional[np.random.Generator] = None,
    executor=None,
) -> tuple[ControlPolicy, MppiDiagnostics]:
    """One sample-rollout-average step; the nominal policy is the last sample."""
    if nominal.horizon != cfg.horizon:
        raise DimensionError("nominal horizon", cfg.horizon, nominal.horizon)
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    U = _sample_policies(nominal, cfg, rng)

    def run(i):
        return rollout(ControlPolicy(U[i]), x0, problem)[1]

    idx = range(cfg.m_samples)
    J = np.array(list(executor.map(run, idx)) if executor is not None else [run(i) for i in idx])
    finite = np.isfinite(J)
    if not finite.any():
        raise TrajBundleError("every sampled rollout was non-finite")
    w = solve_entropy_regularized(J, cfg.lam).alpha
    nz = np.nonzero(w)[0]
    # summing only the weighted samples keeps the lam == 0 case bit-exact
    new = np.tensordot(w[nz], U[nz], axes=1)
    diag = MppiDiagnostics(
        costs=J,
        weights=w,
        best_index=int(np.argmin(J)),
        n_finite=int(finite.sum()),
        ess=float(1.0 / np.sum(w * w)),
    )
    return ControlPolicy(new), diag


@dataclass
class MpcResult:
    trajectory: Trajectory
    diagnostics: list = field(default_factory=list)
    policies: list = field(default_factory=list)


def mpc_run(
    problem: ProblemDefinition,
    x0,
    cfg: MppiConfig,
    steps: int,
    nominal: Optional[ControlPolicy] = None,
) -> MpcResult:
    """Receding-horizon loop: update, apply the first control, shift.

    Step ``t`` draws its noise from ``SeedSequence([rng_seed, t])`` so the run
    does not depend on the number of rollout workers.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (problem.n_x,):
        raise DimensionError("mpc x0", (problem.n_x,), x.shape)
    pol = nominal or ControlPolicy(np.zeros((cfg.horizon, problem.n_u)))
    X = [x]
    applied = []
    diags, pols = [], []
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for t in range(steps):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, t]))
            pol, d = mppi_update(pol, x, problem, cfg, rng=rng, executor=pool)
            u = pol.controls[0].copy()
            x = np.asarray(problem.dynamics(x, u), dtype=float)
            if not np.all(np.isfinite(x)):
                raise TrajBundleError(f"closed-loop state became non-finite at step {t}")
            X.append(x)
            applied.append(u)
            diags.append(d)
            pols.append(pol)
            pol = pol.shifted(cfg.shift_fill)
    finally:
        if pool is not None:
            pool.shutdown()
    return MpcResult(Trajectory(np.array(X), np.array(applied)), diags, pols)

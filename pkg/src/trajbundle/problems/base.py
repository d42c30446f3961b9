"""Problem container shared by the optimizer and the MPPI controller."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from ..bundle import Trajectory
from ..sampling import TrustRegion

Dynamics = Callable[[np.ndarray, np.ndarray], np.ndarray]
StageFn = Callable[[np.ndarray, np.ndarray, int], np.ndarray]
TerminalFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemDefinition:
    """Black-box trajectory optimization problem.

    Knots are indexed ``0..N-1``; controls exist at knots ``0..N-2``. Stage
    residuals and path constraints receive the knot index so that, e.g., goal
    constraints can be attached to the last control knot. Constraints follow
    the convention ``c >= 0`` is feasible. Only function values are exposed;
    there is deliberately no derivative entry point.
    """

    name: str
    n_x: int
    n_u: int
    N: int
    dt: float
    x_init: np.ndarray
    dynamics: Dynamics
    residual: StageFn
    terminal_residual: TerminalFn
    constraint: Optional[StageFn] = None
    n_c: int = 0
    trust_region: Optional[TrustRegion] = None
    initial_guess_fn: Optional[Callable[[], Trajectory]] = None
    goal: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)
    solver_defaults: dict = field(default_factory=dict)  # TbmConfig overrides recommended for this problem

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x_init, dtype=float)).copy()
        x0.setflags(write=False)
        object.__setattr__(self, "x_init", x0)
        if x0.shape != (self.n_x,):
            raise ValueError(f"x_init has shape {x0.shape}, expected ({self.n_x},)")
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.n_c and self.constraint is None:
            raise ValueError("n_c > 0 requires a constraint evaluator")

    def initial_guess(self) -> Trajectory:
        if self.initial_guess_fn is not None:
            return self.initial_guess_fn()
        target = self.x_init if self.goal is None else np.asarray(self.goal, dtype=float)
        return linear_guess(self.x_init, target, self.N, self.n_u)

    def rollout_states(self, controls) -> np.ndarray:
        U = np.asarray(controls, dtype=float).reshape(self.N - 1, self.n_u)
        X = np.empty((self.N, self.n_x))
        X[0] = self.x_init
        for k in range(self.N - 1):
            X[k + 1] = self.dynamics(X[k], U[k])
        return X

    def cost(self, traj: Trajectory) -> float:
        """``sum_k ||r_k||^2 + ||r_N||^2`` at a trajectory."""
        total = 0.0
        for k in range(traj.N - 1):
            r = np.asarray(self.residual(traj.states[k], traj.controls[k], k), dtype=float)
            total += float(r @ r)
        rN = np.asarray(self.terminal_residual(traj.states[-1]), dtype=float)
        return total + float(rN @ rN)

    def describe(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n_x": self.n_x,
            "n_u": self.n_u,
            "n_c": self.n_c,
            "N": self.N,
            "dt": self.dt,
            "x_init": self.x_init.tolist(),
            "goal": None if self.goal is None else np.asarray(self.goal).tolist(),
            "params": self.params,
        }


def linear_guess(x_init, x_goal, N: int, n_u: int) -> Trajectory:
    """Straight-line state interpolation with zero controls."""
    x_init = np.asarray(x_init, dtype=float)
    x_goal = np.asarray(x_goal, dtype=float)
    t = np.linspace(0.0, 1.0, N)[:, None]
    return Trajectory((1.0 - t) * x_init + t * x_goal, np.zeros((N - 1, n_u)))


def rk4_step(ode: Callable[[np.ndarray, np.ndarray], np.ndarray], x, u, h: float) -> np.ndarray:
    """One classical Runge-Kutta step with zero-order-hold control."""
    k1 = ode(x, u)
    k2 = ode(x + 0.5 * h * k1, u)
    k3 = ode(x + 0.5 * h * k2, u)
    k4 = ode(x + h * k3, u)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

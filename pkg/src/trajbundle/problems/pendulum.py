"""Torque-limited pendulum swing-up; a small problem for plumbing checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bundle import Trajectory
from ..sampling import TrustRegion
from .base import ProblemDefinition, rk4_step


@dataclass(frozen=True)
class PendulumConfig:
    N: int = 30
    dt: float = 0.1
    mass: float = 1.0
    length: float = 1.0
    gravity: float = 9.81
    damping: float = 0.1
    u_max: float = 6.0
    w_control: float = 0.1
    w_terminal: float = 1.0
    delta_x: tuple = (0.1, 0.5)
    delta_u: tuple = (1.0,)


def pendulum_ode(x, u, cfg: PendulumConfig = PendulumConfig()) -> np.ndarray:
    th, thd = x
    ml2 = cfg.mass * cfg.length**2
    thdd = (u[0] - cfg.damping * thd - cfg.mass * cfg.gravity * cfg.length * np.sin(th)) / ml2
    return np.array([thd, thdd])


def pendulum(cfg: PendulumConfig | None = None) -> ProblemDefinition:
    """``theta = 0`` hangs down; the goal is ``[pi, 0]`` reached at the final knot."""
    cfg = cfg or PendulumConfig()
    dt = float(cfg.dt)
    goal = np.array([np.pi, 0.0])
    u_max = float(cfg.u_max)
    last = cfg.N - 2

    def dynamics(x, u):
        return rk4_step(lambda xx, uu: pendulum_ode(xx, uu, cfg), np.asarray(x, dtype=float), np.asarray(u, dtype=float), dt)

    def residual(x, u, k):
        return cfg.w_control * np.asarray(u, dtype=float)

    def terminal_residual(x):
        return cfg.w_terminal * (np.asarray(x, dtype=float) - goal)

    def constraint(x, u, k):
        u = np.asarray(u, dtype=float)
        bounds = np.concatenate([u_max - u, u + u_max])
        if k != last:
            return np.concatenate([bounds, np.zeros(4)])
        d = dynamics(x, u) - goal
        return np.concatenate([bounds, d, -d])

    def guess():
        return Trajectory(np.zeros((cfg.N, 2)), np.zeros((cfg.N - 1, 1)))

    return ProblemDefinition(
        name="pendulum",
        n_x=2,
        n_u=1,
        N=cfg.N,
        dt=dt,
        x_init=np.zeros(2),
        dynamics=dynamics,
        residual=residual,
        terminal_residual=terminal_residual,
        constraint=constraint,
        n_c=6,
        trust_region=TrustRegion(np.asarray(cfg.delta_x), np.asarray(cfg.delta_u)),
        initial_guess_fn=guess,
        goal=goal,
        params={
            "mass": cfg.mass,
            "length": cfg.length,
            "gravity": cfg.gravity,
            "damping": cfg.damping,
            "u_max": u_max,
        },
        solver_defaults={"tr_shrink_on_mismatch": True},
    )

"""Planar double integrator steering around circular obstacles.

State ``[px, py, vx, vy]``, control ``[ax, ay]`` (acceleration). Obstacles
enter as ``|p - p_j|^2 - rho_j^2 >= 0``; the goal enters through the terminal
residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sampling import TrustRegion
from ..bundle import Trajectory
from .base import ProblemDefinition, linear_guess


@dataclass(frozen=True)
class DoubleIntegratorConfig:
    N: int = 40
    dt: float = 0.1
    x_init: tuple = (0.0, 0.0, 0.0, 0.0)
    goal: tuple = (4.0, 4.0, 0.0, 0.0)
    obstacles: tuple = ((1.0, 1.1, 0.5), (2.2, 2.0, 0.45), (3.0, 3.2, 0.45))  # (cx, cy, radius)
    u_max: float = 3.0
    w_state: float = 0.1
    w_control: float = 0.1
    w_terminal: float = 10.0
    delta_x: tuple = (0.2, 0.2, 0.5, 0.5)
    delta_u: tuple = (1.0, 1.0)
    initial_guess: str = "straight_line"  # or "linear": state interpolation, zero controls


def di_dynamics(x, u, dt: float) -> np.ndarray:
    """Exact discretization for piecewise-constant acceleration."""
    p, v = x[:2], x[2:]
    return np.concatenate([p + dt * v + 0.5 * dt * dt * u, v + dt * u])


def straight_line_guess(cfg: DoubleIntegratorConfig) -> Trajectory:
    """Accelerate-then-brake rollout along the start-goal segment.

    The guess is dynamically consistent and ends exactly at the goal position
    (at rest when the number of intervals is even), so early iterations only
    need to push the path out of the obstacles.
    """
    n = cfg.N - 1
    h = n // 2
    profile = np.zeros(n)
    profile[:h] = 1.0
    profile[n - h :] = -1.0
    x0 = np.asarray(cfg.x_init, dtype=float)
    goal = np.asarray(cfg.goal, dtype=float)

    def roll(U):
        X = np.empty((cfg.N, 4))
        X[0] = x0
        for k in range(n):
            X[k + 1] = di_dynamics(X[k], U[k], cfg.dt)
        return X

    # final position is affine in the acceleration magnitude
    direction = goal[:2] - x0[:2]
    drift = roll(np.zeros((n, 2)))[-1, :2]
    unit = roll(np.outer(profile, direction))[-1, :2] - drift
    scale = float(np.dot(unit, goal[:2] - drift) / np.dot(unit, unit)) if np.any(unit) else 0.0
    U = scale * np.outer(profile, direction)
    return Trajectory(roll(U), U)


def check_layout(cfg: DoubleIntegratorConfig) -> None:
    """Reject layouts where the start or goal sits inside an obstacle."""
    for name, pt in (("x_init", cfg.x_init), ("goal", cfg.goal)):
        p = np.asarray(pt[:2], dtype=float)
        for j, (cx, cy, r) in enumerate(cfg.obstacles):
            if r <= 0:
                raise ValueError(f"obstacle {j} has non-positive radius {r}")
            if np.hypot(p[0] - cx, p[1] - cy) <= r:
                raise ValueError(f"{name} lies inside obstacle {j}")


def double_integrator_obstacles(cfg: DoubleIntegratorConfig | None = None, **overrides) -> ProblemDefinition:
    if cfg is None:
        cfg = DoubleIntegratorConfig(**overrides)
    elif overrides:
        raise TypeError("pass either cfg or keyword overrides, not both")
    check_layout(cfg)
    if cfg.initial_guess not in ("straight_line", "linear"):
        raise ValueError(f"initial_guess must be 'straight_line' or 'linear', got {cfg.initial_guess!r}")
    dt = float(cfg.dt)
    goal = np.asarray(cfg.goal, dtype=float)
    obs = np.asarray(cfg.obstacles, dtype=float).reshape(-1, 3)
    centers, radii2 = obs[:, :2], obs[:, 2] ** 2
    u_max = float(cfg.u_max)
    ws, wu, wN = cfg.w_state, cfg.w_control, cfg.w_terminal

    def dynamics(x, u):
        return di_dynamics(np.asarray(x, dtype=float), np.asarray(u, dtype=float), dt)

    def residual(x, u, k):
        return np.concatenate([ws * (np.asarray(x) - goal), wu * np.asarray(u)])

    def terminal_residual(x):
        return wN * (np.asarray(x) - goal)

    def constraint(x, u, k):
        d = np.asarray(x)[:2] - centers
        u = np.asarray(u)
        return np.concatenate([np.sum(d * d, axis=1) - radii2, u_max - u, u + u_max])

    n_c = len(obs) + 4
    return ProblemDefinition(
        name="double_integrator",
        n_x=4,
        n_u=2,
        N=cfg.N,
        dt=dt,
        x_init=np.asarray(cfg.x_init, dtype=float),
        dynamics=dynamics,
        residual=residual,
        terminal_residual=terminal_residual,
        constraint=constraint,
        n_c=n_c,
        trust_region=TrustRegion(np.asarray(cfg.delta_x), np.asarray(cfg.delta_u)),
        initial_guess_fn=(
            (lambda: straight_line_guess(cfg))
            if cfg.initial_guess == "straight_line"
            else (lambda: linear_guess(cfg.x_init, goal, cfg.N, 2))
        ),
        solver_defaults={"tr_shrink_on_mismatch": True},
        goal=goal,
        params={
            "obstacles": obs.tolist(),
            "u_max": u_max,
            "w_state": ws,
            "w_control": wu,
            "w_terminal": wN,
        },
    )

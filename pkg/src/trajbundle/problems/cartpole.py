"""Cartpole swing-up from hanging to upright.

State ``[x, xdot, theta, thetadot]`` with ``theta = 0`` hanging down and
``theta = pi`` upright; control is the horizontal force on the cart. The pole
is modelled as a point mass at distance ``l`` from the pivot, without friction.

The goal is imposed as a constraint on the state reached from the last control
knot, written as the inequality pair ``f(x, u) - g >= 0`` and
``g - f(x, u) >= 0``. Force bounds are the remaining constraint rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..sampling import TrustRegion
from ..bundle import Trajectory
from .base import ProblemDefinition, linear_guess, rk4_step
from .mlp import MlpWeights, load_weights, mlp_forward


@dataclass(frozen=True)
class CartpoleParams:
    m_cart: float = 1.0
    m_pole: float = 0.2
    length: float = 0.5
    gravity: float = 9.81


@dataclass(frozen=True)
class CartpoleConfig:
    N: int = 50
    dt: float = 0.05
    params: CartpoleParams = CartpoleParams()
    u_max: float = 20.0
    w_control: float = 0.1
    w_terminal: float = 1.0
    delta_x: tuple = (0.05, 0.2, 0.1, 0.5)
    delta_u: tuple = (2.0,)
    initial_guess: str = "hanging"  # or "linear": state interpolation to the goal, zero controls


def cartpole_ode(x, u, p: CartpoleParams = CartpoleParams()) -> np.ndarray:
    _, xd, th, thd = x
    f = u[0]
    s, c = np.sin(th), np.cos(th)
    den = p.m_cart + p.m_pole * s * s
    xdd = (f + p.m_pole * s * (p.length * thd * thd + p.gravity * c)) / den
    thdd = (-f * c - p.m_pole * p.length * thd * thd * c * s - (p.m_cart + p.m_pole) * p.gravity * s) / (p.length * den)
    return np.array([xd, xdd, thd, thdd])


def cartpole_energy(x, p: CartpoleParams = CartpoleParams()) -> float:
    _, xd, th, thd = x
    kinetic = 0.5 * (p.m_cart + p.m_pole) * xd**2 + p.m_pole * p.length * xd * thd * np.cos(th)
    kinetic += 0.5 * p.m_pole * p.length**2 * thd**2
    return float(kinetic - p.m_pole * p.gravity * p.length * np.cos(th))


def cartpole_step(x, u, dt: float, p: CartpoleParams = CartpoleParams()) -> np.ndarray:
    return rk4_step(lambda xx, uu: cartpole_ode(xx, uu, p), np.asarray(x, dtype=float), np.asarray(u, dtype=float), dt)


def wrap_angle(a):
    """Map angles to ``[-pi, pi)``."""
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def upright_error(x, goal=(0.0, 0.0, np.pi, 0.0)) -> float:
    """State inf-norm distance to ``goal`` with the angle difference wrapped."""
    d = np.asarray(x, dtype=float) - np.asarray(goal, dtype=float)
    d[2] = wrap_angle(d[2])
    return float(np.max(np.abs(d)))


def hanging_guess(dynamics, N: int, n_x: int, n_u: int) -> Trajectory:
    """Zero-force rollout from the initial state (the hanging equilibrium)."""
    U = np.zeros((N - 1, n_u))
    X = np.zeros((N, n_x))
    for k in range(N - 1):
        X[k + 1] = dynamics(X[k], U[k])
    return Trajectory(X, U)


def cartpole(
    analytic: bool = True,
    weights_path: str | Path | None = None,
    cfg: CartpoleConfig | None = None,
    weights: Optional[MlpWeights] = None,
) -> ProblemDefinition:
    """Swing-up problem with analytic RK4 dynamics or a loaded MLP model.

    In MLP mode the network maps ``[x, u]`` (5 inputs) to the next state.
    ``weights`` may be passed directly instead of a file path.
    """
    cfg = cfg or CartpoleConfig()
    if cfg.initial_guess not in ("hanging", "linear"):
        raise ValueError(f"initial_guess must be 'hanging' or 'linear', got {cfg.initial_guess!r}")
    dt = float(cfg.dt)
    n_x, n_u = 4, 1
    if analytic:
        if weights_path is not None or weights is not None:
            raise ValueError("weights are only used when analytic=False")
        p = cfg.params

        def dynamics(x, u):
            return cartpole_step(x, u, dt, p)

        source = "analytic"
    else:
        if weights is None:
            if weights_path is None:
                raise ValueError("weights_path is required when analytic=False")
            weights = load_weights(weights_path, n_out=n_x)
        if weights.n_in != n_x + n_u or weights.n_out != n_x:
            raise ValueError(f"network must map {n_x + n_u} inputs to {n_x} outputs, got {weights.n_in}->{weights.n_out}")
        net = weights

        def dynamics(x, u):
            return mlp_forward(net, np.concatenate([np.asarray(x, dtype=float), np.asarray(u, dtype=float)]))

        source = "mlp" if weights_path is None else str(weights_path)

    goal = np.array([0.0, 0.0, np.pi, 0.0])
    u_max = float(cfg.u_max)
    last = cfg.N - 2
    wu, wN = cfg.w_control, cfg.w_terminal

    def residual(x, u, k):
        return wu * np.asarray(u, dtype=float)

    def terminal_residual(x):
        return wN * (np.asarray(x, dtype=float) - goal)

    def constraint(x, u, k):
        u = np.asarray(u, dtype=float)
        bounds = np.concatenate([u_max - u, u + u_max])
        if k != last:
            return np.concatenate([bounds, np.zeros(2 * n_x)])
        d = dynamics(x, u) - goal
        return np.concatenate([bounds, d, -d])

    return ProblemDefinition(
        name="cartpole" if analytic else "cartpole_mlp",
        n_x=n_x,
        n_u=n_u,
        N=cfg.N,
        dt=dt,
        x_init=np.zeros(n_x),
        dynamics=dynamics,
        residual=residual,
        terminal_residual=terminal_residual,
        constraint=constraint,
        n_c=2 * n_u + 2 * n_x,
        trust_region=TrustRegion(np.asarray(cfg.delta_x), np.asarray(cfg.delta_u)),
        initial_guess_fn=(
            (lambda: hanging_guess(dynamics, cfg.N, n_x, n_u))
            if cfg.initial_guess == "hanging"
            else (lambda: linear_guess(np.zeros(n_x), goal, cfg.N, n_u))
        ),
        goal=goal,
        params={
            "dynamics": source,
            "m_cart": cfg.params.m_cart,
            "m_pole": cfg.params.m_pole,
            "length": cfg.params.length,
            "gravity": cfg.params.gravity,
            "u_max": u_max,
            "w_control": wu,
            "w_terminal": wN,
        },
        solver_defaults={"tr_shrink_on_mismatch": True},
    )

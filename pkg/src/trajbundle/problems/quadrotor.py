"""Quadrotor tracking a skewed figure-eight (optional, heavier problem).

State (13): position, unit quaternion ``[w, x, y, z]`` (body to world), world
velocity, body angular rate. Controls (4): rotor speeds in normalized units,
each producing thrust ``kf * u**2`` and drag torque ``km * u**2``. Rotors sit
in a plus configuration: 1 on +x, 2 on +y, 3 on -x, 4 on -y, with 1 and 3
spinning opposite to 2 and 4.

The physical parameters are generic small-quadrotor values, not tied to any
particular vehicle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bundle import Trajectory
from ..sampling import TrustRegion
from .base import ProblemDefinition, rk4_step


@dataclass(frozen=True)
class QuadrotorConfig:
    N: int = 100
    dt: float = 0.05
    mass: float = 0.5
    arm: float = 0.175
    inertia: tuple = (0.0023, 0.0023, 0.004)
    gravity: float = 9.81
    kf: float = 1.0
    km: float = 0.0245
    u_max: float = 2.5
    period: float = 5.0
    amplitude: float = 1.0
    skew: float = 0.3
    height: float = 1.0
    w_position: float = 3.0
    w_rate: float = 0.1
    w_control: float = 0.3
    delta_x: tuple = (0.05,) * 3 + (0.02,) * 4 + (0.1,) * 3 + (0.3,) * 3
    delta_u: tuple = (0.1,) * 4


def quat_mul(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_to_rot(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quadrotor_ode(x, u, cfg: QuadrotorConfig = QuadrotorConfig()) -> np.ndarray:
    q, v, om = x[3:7], x[7:10], x[10:13]
    f = cfg.kf * np.asarray(u) ** 2
    tq = cfg.km * np.asarray(u) ** 2
    J = np.asarray(cfg.inertia)
    thrust = np.array([0.0, 0.0, f.sum()])
    torque = np.array([cfg.arm * (f[1] - f[3]), cfg.arm * (f[2] - f[0]), tq[0] - tq[1] + tq[2] - tq[3]])
    dq = 0.5 * quat_mul(q, np.concatenate([[0.0], om]))
    dv = quat_to_rot(q) @ thrust / cfg.mass - np.array([0.0, 0.0, cfg.gravity])
    dom = (torque - np.cross(om, J * om)) / J
    return np.concatenate([v, dq, dv, dom])


def quadrotor_step(x, u, dt: float, cfg: QuadrotorConfig = QuadrotorConfig(), renormalize: bool = True) -> np.ndarray:
    """RK4 step followed by projecting the quaternion back to unit norm."""
    xn = rk4_step(lambda xx, uu: quadrotor_ode(xx, uu, cfg), np.asarray(x, dtype=float), np.asarray(u, dtype=float), dt)
    if renormalize:
        xn[3:7] /= np.linalg.norm(xn[3:7])
    return xn


def hover_speed(cfg: QuadrotorConfig) -> float:
    return float(np.sqrt(cfg.mass * cfg.gravity / (4.0 * cfg.kf)))


def figure_eight(t, cfg: QuadrotorConfig) -> np.ndarray:
    """Reference position; the vertical term tilts the figure-eight plane."""
    w = 2.0 * np.pi / cfg.period
    t = np.asarray(t, dtype=float)
    a = cfg.amplitude
    return np.stack([a * np.sin(w * t), 0.5 * a * np.sin(2 * w * t), cfg.height + cfg.skew * np.sin(w * t)], axis=-1)


def quadrotor_figure8(cfg: QuadrotorConfig | None = None) -> ProblemDefinition:
    cfg = cfg or QuadrotorConfig()
    dt = float(cfg.dt)
    ts = dt * np.arange(cfg.N)
    ref = figure_eight(ts, cfg)
    uh = hover_speed(cfg)
    x_init = np.concatenate([ref[0], [1.0, 0.0, 0.0, 0.0], np.zeros(6)])

    def dynamics(x, u):
        return quadrotor_step(x, u, dt, cfg)

    def residual(x, u, k):
        x = np.asarray(x, dtype=float)
        return np.concatenate([
            cfg.w_position * (x[:3] - ref[k]),
            cfg.w_rate * x[10:13],
            cfg.w_control * (np.asarray(u, dtype=float) - uh),
        ])

    def terminal_residual(x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([cfg.w_position * (x[:3] - ref[-1]), cfg.w_rate * x[10:13]])

    def constraint(x, u, k):
        u = np.asarray(u, dtype=float)
        return np.concatenate([u, cfg.u_max - u])

    def guess():
        X = np.zeros((cfg.N, 13))
        X[:, :3] = ref
        X[:, 3] = 1.0
        X[:-1, 7:10] = np.diff(ref, axis=0) / dt
        X[0] = x_init
        return Trajectory(X, np.full((cfg.N - 1, 4), uh))

    return ProblemDefinition(
        name="quadrotor_figure8",
        n_x=13,
        n_u=4,
        N=cfg.N,
        dt=dt,
        x_init=x_init,
        dynamics=dynamics,
        residual=residual,
        terminal_residual=terminal_residual,
        constraint=constraint,
        n_c=8,
        trust_region=TrustRegion(np.asarray(cfg.delta_x), np.asarray(cfg.delta_u)),
        initial_guess_fn=guess,
        goal=None,
        params={
            "mass": cfg.mass,
            "arm": cfg.arm,
            "inertia": list(cfg.inertia),
            "kf": cfg.kf,
            "km": cfg.km,
            "u_max": cfg.u_max,
            "period": cfg.period,
        },
        solver_defaults={"tr_shrink_on_mismatch": True},
    )

"""Scalar integrator ``x+ = x + u``, used for controller regulation checks."""

from __future__ import annotations

import numpy as np

from ..sampling import TrustRegion
from .base import ProblemDefinition


def scalar_integrator(
    N: int = 11, x_init: float = 0.0, w_state: float = 1.0, w_control: float = 0.0, u_max: float | None = None
) -> ProblemDefinition:
    """Regulate a scalar integrator to zero with residuals ``[w_state x, w_control u]``.

    With ``w_control == 0`` the stage residual is just ``w_state * x``. A
    finite ``u_max`` adds the bound rows ``u_max - u >= 0`` and ``u + u_max >= 0``.
    """
    wx, wu = float(w_state), float(w_control)

    def dynamics(x, u):
        return np.asarray(x, dtype=float) + np.asarray(u, dtype=float)

    def residual(x, u, k):
        r = [wx * np.asarray(x, dtype=float)]
        if wu:
            r.append(wu * np.asarray(u, dtype=float))
        return np.concatenate(r)

    def terminal_residual(x):
        return wx * np.asarray(x, dtype=float)

    constraint, n_c = None, 0
    if u_max is not None:
        um = float(u_max)

        def constraint(x, u, k):
            u = np.asarray(u, dtype=float)
            return np.concatenate([um - u, u + um])

        n_c = 2

    return ProblemDefinition(
        name="scalar_integrator",
        n_x=1,
        n_u=1,
        N=N,
        dt=1.0,
        x_init=np.array([float(x_init)]),
        dynamics=dynamics,
        residual=residual,
        terminal_residual=terminal_residual,
        constraint=constraint,
        n_c=n_c,
        trust_region=TrustRegion(np.array([0.5]), np.array([0.5])),
        goal=np.zeros(1),
        params={"w_state": wx, "w_control": wu, "u_max": u_max},
    )

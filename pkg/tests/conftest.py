import numpy as np
import pytest

from trajbundle.bundle import Trajectory
from trajbundle.problems.base import ProblemDefinition
from trajbundle.sampling import TrustRegion


def random_affine_problem(rng, n_x, n_u, N, n_c=0, delta=0.3):
    """Affine f, r, c with a rollout guess that satisfies c with margin.

    Returns ``(problem, guess)``; the guess is dynamically feasible, so it is
    a zero-slack point of the first bundled subproblem.
    """
    A = np.eye(n_x) + 0.2 * rng.standard_normal((n_x, n_x))
    B = rng.standard_normal((n_x, n_u))
    d = 0.1 * rng.standard_normal(n_x)
    n_r = n_x + n_u
    Cr = rng.standard_normal((n_r, n_x + n_u))
    er = rng.standard_normal(n_r)
    Ct = rng.standard_normal((n_x, n_x))
    x0 = rng.standard_normal(n_x)

    U = rng.standard_normal((N - 1, n_u))
    X = np.empty((N, n_x))
    X[0] = x0
    for k in range(N - 1):
        X[k + 1] = A @ X[k] + B @ U[k] + d
    Cc = rng.standard_normal((n_c, n_x + n_u))
    if n_c:
        vals = np.array([Cc @ np.concatenate([X[k], U[k]]) for k in range(N - 1)])
        ec = -vals.min(axis=0) + 0.1
    else:
        ec = np.zeros(0)

    problem = ProblemDefinition(
        name="affine",
        n_x=n_x,
        n_u=n_u,
        N=N,
        dt=1.0,
        x_init=x0,
        dynamics=lambda x, u: A @ x + B @ u + d,
        residual=lambda x, u, k: Cr @ np.concatenate([x, u]) + er,
        terminal_residual=lambda x: Ct @ x,
        constraint=(lambda x, u, k: Cc @ np.concatenate([x, u]) + ec) if n_c else None,
        n_c=n_c,
        trust_region=TrustRegion(np.full(n_x, delta), np.full(n_u, delta)),
    )
    return problem, Trajectory(X, U)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

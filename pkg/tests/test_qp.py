import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from trajbundle.qp import (
    MAX_ITER,
    NUMERICAL_FAILURE,
    OPTIMAL,
    IPMSettings,
    QPSettings,
    solve_qp,
    solve_qp_ipm,
)


def random_qp(seed, n=6, me=2, mi=4, psd_rank=None):
    """Feasible QP ``min 0.5x'Px + q'x, Ax = b, Gx >= h`` built around a known interior point."""
    rng = np.random.default_rng(seed)
    r = n if psd_rank is None else psd_rank
    L = rng.standard_normal((r, n))
    P = L.T @ L + (1e-3 * np.eye(n) if psd_rank is None else 0)
    q = rng.standard_normal(n)
    A = rng.standard_normal((me, n))
    G = rng.standard_normal((mi, n))
    x0 = rng.standard_normal(n)
    b = A @ x0
    h = G @ x0 - rng.uniform(0.1, 1.0, mi)
    # box keeps rank-deficient instances bounded
    G = np.vstack([G, np.eye(n), -np.eye(n)])
    h = np.concatenate([h, np.full(n, -10.0) + np.minimum(x0, 0), np.full(n, -10.0) - np.maximum(x0, 0)])
    return P, q, A, b, G, h


def kkt_violation(P, q, A, b, G, h, x, y, z):
    """Independent KKT check for ``Gx >= h`` with multipliers ``z >= 0``."""
    stat = P @ x + q - A.T @ y - G.T @ z
    slack = G @ x - h
    return max(
        np.abs(stat).max() / (1 + np.abs(q).max()),
        np.abs(A @ x - b).max(initial=0.0),
        max(-slack.min(), 0.0),
        max(-z.min(), 0.0),
        np.abs(slack * z).max() / (1 + abs(0.5 * x @ P @ x + q @ x)),
    )


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), rank=st.sampled_from([None, 2]))
def test_ipm_satisfies_kkt(seed, rank):
    P, q, A, b, G, h = random_qp(seed, psd_rank=rank)
    res = solve_qp_ipm(P, q, A, b, G, h)
    assert res.status == OPTIMAL
    me = A.shape[0]
    assert kkt_violation(P, q, A, b, G, h, res.x, res.y[:me], res.y[me:]) < 1e-7


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_admm_agrees_with_ipm(seed):
    P, q, A, b, G, h = random_qp(seed)
    r1 = solve_qp_ipm(P, q, A, b, G, h)
    M = np.vstack([A, G])
    r2 = solve_qp(P, q, M, np.concatenate([b, h]), np.concatenate([b, np.full(h.size, np.inf)]))
    assert r2.status == OPTIMAL
    assert r2.objective == pytest.approx(r1.objective, abs=1e-6 * (1 + abs(r1.objective)))
    np.testing.assert_allclose(r2.x, r1.x, atol=1e-5)


def test_ipm_merit_nonincreasing():
    P, q, A, b, G, h = random_qp(3)
    res = solve_qp_ipm(P, q, A, b, G, h, IPMSettings(record_merit=True))
    m = np.array(res.merit_history)
    assert m.size > 3
    assert np.all(m[1:] <= m[:-1] * (1 + 1e-9) + 1e-12)


def test_ipm_is_repeatable():
    P, q, A, b, G, h = random_qp(11)
    r1 = solve_qp_ipm(P, q, A, b, G, h)
    r2 = solve_qp_ipm(P, q, A, b, G, h)
    assert abs(r1.objective - r2.objective) <= 10 * 1e-8


def test_ipm_iteration_limit_reports_max_iter():
    P, q, A, b, G, h = random_qp(5)
    res = solve_qp_ipm(P, q, A, b, G, h, IPMSettings(max_iter=2))
    assert res.status in (MAX_ITER, NUMERICAL_FAILURE)
    assert len(res.residual_history) >= 1


def test_ipm_infeasible_does_not_raise():
    # x >= 1 and x <= -1
    res = solve_qp_ipm(np.eye(1), np.zeros(1), None, None, np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    assert res.status != OPTIMAL
    assert res.residual_history


def test_bad_shapes_rejected():
    with pytest.raises(ValueError):
        solve_qp_ipm(np.eye(2), np.zeros(3), None, None, None, None)


def test_unconstrained_quadratic():
    P = np.diag([2.0, 4.0])
    q = np.array([-2.0, -4.0])
    res = solve_qp_ipm(P, q, None, None, None, None)
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-10)


def test_admm_box_qp():
    # min 0.5 (x-2)^2 with 0 <= x <= 1
    res = solve_qp(sp.eye(1), np.array([-2.0]), sp.eye(1), np.zeros(1), np.ones(1), QPSettings())
    assert res.status == OPTIMAL
    assert res.x[0] == pytest.approx(1.0, abs=1e-8)

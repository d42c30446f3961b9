from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import softmax_reference
from trajbundle.errors import DimensionError, TrajBundleError
from trajbundle.mppi import ControlPolicy, MppiConfig, mpc_run, mppi_update, rollout
from trajbundle.problems import pendulum, scalar_integrator
from trajbundle.problems.base import ProblemDefinition
from trajbundle.scp import violation


def test_rollout_hand_example():
    p = scalar_integrator()
    traj, cost = rollout(ControlPolicy([[1.0], [1.0]]), [0.0], p)
    np.testing.assert_array_equal(traj.states[:, 0], [0.0, 1.0, 2.0])
    assert cost == 5.0


def test_rollout_constant_dynamics():
    p = ProblemDefinition(
        name="still",
        n_x=2,
        n_u=1,
        N=4,
        dt=1.0,
        x_init=np.array([1.0, -1.0]),
        dynamics=lambda x, u: np.array([1.0, -1.0]),
        residual=lambda x, u, k: np.zeros(1),
        terminal_residual=lambda x: np.zeros(1),
    )
    traj, cost = rollout(ControlPolicy(np.ones((3, 1))), p.x_init, p)
    assert cost == 0.0
    assert np.all(traj.states == [1.0, -1.0])


def test_rollout_non_finite_is_infinite_cost():
    p = ProblemDefinition(
        name="blowup",
        n_x=1,
        n_u=1,
        N=3,
        dt=1.0,
        x_init=np.zeros(1),
        dynamics=lambda x, u: x * 1e300 + u * 1e300,
        residual=lambda x, u, k: x,
        terminal_residual=lambda x: x,
    )
    _, cost = rollout(ControlPolicy([[1e10], [1e10]]), [1.0], p)
    assert cost == np.inf


def test_rollout_dimension_checks():
    p = scalar_integrator()
    with pytest.raises(DimensionError):
        rollout(ControlPolicy(np.zeros((2, 2))), [0.0], p)
    with pytest.raises(DimensionError):
        rollout(ControlPolicy(np.zeros((2, 1))), [0.0, 1.0], p)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), H=st.integers(1, 8))
def test_rollout_is_dynamics_consistent(seed, H):
    p = pendulum()
    U = np.random.default_rng(seed).uniform(-3, 3, (H, 1))
    traj, _ = rollout(ControlPolicy(U), p.x_init, p)
    for k in range(H):
        np.testing.assert_array_equal(traj.states[k + 1], p.dynamics(traj.states[k], U[k]))


def test_config_validation():
    for kw in ({"lam": -1.0}, {"m_samples": 0}, {"noise_sigma": 0.0}, {"shift_fill": "mirror"}, {"horizon": 0}):
        with pytest.raises(ValueError):
            MppiConfig(**kw)


def test_shift_fills():
    pol = ControlPolicy([[1.0], [2.0], [3.0]])
    np.testing.assert_array_equal(pol.shifted("repeat_last").controls[:, 0], [2.0, 3.0, 3.0])
    np.testing.assert_array_equal(pol.shifted("zero").controls[:, 0], [2.0, 3.0, 0.0])


def test_single_sample_returns_nominal():
    p = scalar_integrator()
    nom = ControlPolicy(np.linspace(-1, 1, 5)[:, None])
    new, d = mppi_update(nom, [1.0], p, MppiConfig(m_samples=1, horizon=5))
    np.testing.assert_array_equal(new.controls, nom.controls)
    assert d.weights.tolist() == [1.0]


@pytest.mark.parametrize("seed", range(10))
def test_lambda_zero_returns_best_sample_bitwise(seed):
    p = scalar_integrator(w_state=3.0, w_control=0.1)
    cfg = MppiConfig(lam=0.0, m_samples=32, noise_sigma=0.3, horizon=6, rng_seed=seed)
    nom = ControlPolicy(np.zeros((6, 1)))
    new, d = mppi_update(nom, [1.5], p, cfg, rng=np.random.default_rng(seed))
    # regenerate the same samples and pick the minimum independently
    rng = np.random.default_rng(seed)
    U = np.concatenate([0.3 * rng.standard_normal((31, 6, 1)), np.zeros((1, 6, 1))])
    J = [rollout(ControlPolicy(u), [1.5], p)[1] for u in U]
    best = int(np.argmin(J))
    assert d.best_index == best
    assert new.controls.tobytes() == U[best].tobytes()


def test_equal_costs_give_mean():
    # cost independent of the controls
    p = ProblemDefinition(
        name="flat",
        n_x=1,
        n_u=1,
        N=3,
        dt=1.0,
        x_init=np.zeros(1),
        dynamics=lambda x, u: x,
        residual=lambda x, u, k: np.zeros(1),
        terminal_residual=lambda x: np.zeros(1),
    )
    cfg = MppiConfig(lam=1.0, m_samples=2, horizon=2, rng_seed=4)
    new, d = mppi_update(ControlPolicy(np.zeros((2, 1))), [0.0], p, cfg, rng=np.random.default_rng(4))
    u0 = np.random.default_rng(4).standard_normal((1, 2, 1))[0]
    np.testing.assert_allclose(new.controls, 0.5 * u0, atol=1e-15)
    np.testing.assert_array_equal(d.weights, [0.5, 0.5])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), lam=st.sampled_from([0.01, 0.1, 1.0, 10.0]))
def test_weights_match_softmax_and_average_is_contained(seed, lam):
    p = scalar_integrator(w_state=1.0, w_control=0.5)
    cfg = MppiConfig(lam=lam, m_samples=16, noise_sigma=0.5, horizon=4, rng_seed=seed)
    nom = ControlPolicy(np.full((4, 1), 0.2))
    new, d = mppi_update(nom, [1.0], p, cfg, rng=np.random.default_rng(seed))
    np.testing.assert_allclose(d.weights, softmax_reference(d.costs, lam), atol=1e-12)
    rng = np.random.default_rng(seed)
    U = np.concatenate([0.2 + 0.5 * rng.standard_normal((15, 4, 1)), nom.controls[None]])
    assert np.all(new.controls >= U.min(axis=0) - 1e-12)
    assert np.all(new.controls <= U.max(axis=0) + 1e-12)
    assert 1.0 <= d.ess <= 16.0 + 1e-9


def test_parallel_rollouts_match_serial():
    p = pendulum()
    cfg = MppiConfig(lam=0.5, m_samples=24, noise_sigma=1.0, horizon=10)
    nom = ControlPolicy(np.zeros((10, 1)))
    a, da = mppi_update(nom, p.x_init, p, cfg, rng=np.random.default_rng(1))
    with ThreadPoolExecutor(6) as ex:
        b, db = mppi_update(nom, p.x_init, p, cfg, rng=np.random.default_rng(1), executor=ex)
    assert a.controls.tobytes() == b.controls.tobytes()
    assert da.costs.tobytes() == db.costs.tobytes()


def test_all_non_finite_raises():
    p = ProblemDefinition(
        name="nan",
        n_x=1,
        n_u=1,
        N=3,
        dt=1.0,
        x_init=np.zeros(1),
        dynamics=lambda x, u: x + np.nan,
        residual=lambda x, u, k: x,
        terminal_residual=lambda x: x,
    )
    with pytest.raises(TrajBundleError):
        mppi_update(ControlPolicy(np.zeros((2, 1))), [0.0], p, MppiConfig(horizon=2, m_samples=4))


def test_horizon_mismatch():
    with pytest.raises(DimensionError):
        mppi_update(ControlPolicy(np.zeros((3, 1))), [0.0], scalar_integrator(), MppiConfig(horizon=4))


def test_mpc_single_sample_equals_open_loop():
    p = scalar_integrator()
    U = np.array([[0.5], [-0.25], [1.0], [0.0]])
    cfg = MppiConfig(m_samples=1, horizon=4, shift_fill="zero")
    res = mpc_run(p, [0.3], cfg, steps=4, nominal=ControlPolicy(U))
    ol, _ = rollout(ControlPolicy(U), [0.3], p)
    np.testing.assert_array_equal(res.trajectory.controls, U)
    np.testing.assert_array_equal(res.trajectory.states, ol.states)


def test_mpc_trajectory_is_dynamics_consistent():
    p = pendulum()
    res = mpc_run(p, p.x_init, MppiConfig(lam=1.0, m_samples=16, horizon=8, noise_sigma=1.0), steps=12)
    t = res.trajectory
    assert t.N == 13 and len(res.diagnostics) == 12
    for k in range(12):
        np.testing.assert_array_equal(t.states[k + 1], p.dynamics(t.states[k], t.controls[k]))
    pd = ProblemDefinition(**{**p.__dict__, "N": 13})
    assert violation(t, pd) == 0.0


def test_mpc_is_seeded_and_worker_independent():
    p = scalar_integrator(w_state=3.0, w_control=0.1)
    cfg = dict(lam=1.0, m_samples=32, noise_sigma=0.2, horizon=10, rng_seed=5)
    a = mpc_run(p, [2.0], MppiConfig(**cfg), steps=10)
    b = mpc_run(p, [2.0], MppiConfig(**cfg, workers=4), steps=10)
    c = mpc_run(p, [2.0], MppiConfig(**{**cfg, "rng_seed": 6}), steps=10)
    assert a.trajectory.states.tobytes() == b.trajectory.states.tobytes()
    assert a.trajectory.states.tobytes() != c.trajectory.states.tobytes()


def test_mpc_rejects_bad_steps():
    with pytest.raises(ValueError):
        mpc_run(scalar_integrator(), [0.0], MppiConfig(), steps=0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from trajbundle.bundle import (
    KnotBundle,
    SimplexWeights,
    Trajectory,
    assemble_bundle,
    interpolate,
    interpolated_trajectory,
    project_simplex,
)
from trajbundle.errors import DimensionError, EvaluatorError
from trajbundle.problems import double_integrator_obstacles
from trajbundle.problems.base import ProblemDefinition

finite = st.floats(-10, 10, allow_nan=False)


def test_trajectory_shapes_enforced():
    Trajectory(np.zeros((3, 2)), np.zeros((2, 1)))
    with pytest.raises(DimensionError):
        Trajectory(np.zeros((3, 2)), np.zeros((3, 1)))


def test_interpolate_midpoint():
    assert interpolate([[0.0, 1.0]], [0.5, 0.5]) == pytest.approx([0.5])


def test_interpolate_one_hot_selects_column():
    W = np.arange(12.0).reshape(3, 4)
    for j in range(4):
        np.testing.assert_array_equal(interpolate(W, np.eye(4)[j]), W[:, j])


def test_interpolate_affine_example():
    Wy = np.array([[0.0, 1.0]])
    Wp = np.array([[1.0, 3.0]])
    a = [0.25, 0.75]
    assert interpolate(Wy, a)[0] == pytest.approx(0.75)
    assert interpolate(Wp, a)[0] == pytest.approx(2 * 0.75 + 1)


def test_interpolate_dimension_error_names_lengths():
    with pytest.raises(DimensionError) as e:
        interpolate(np.zeros((2, 3)), [0.5, 0.5])
    assert e.value.expected == 3 and e.value.got == 2


@settings(max_examples=200, deadline=None)
@given(
    m=st.integers(1, 8),
    d_in=st.integers(1, 4),
    d_out=st.integers(1, 4),
    seed=st.integers(0, 2**31 - 1),
)
def test_affine_exactness(m, d_in, d_out, seed):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((d_out, d_in))
    dvec = rng.standard_normal(d_out)
    Wy = rng.standard_normal((d_in, m)) * 5
    Wp = C @ Wy + dvec[:, None]
    alpha = rng.dirichlet(np.ones(m))
    lhs = dvec + C @ interpolate(Wy, alpha)
    rhs = interpolate(Wp, alpha)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * (1 + np.abs(Wp).max()))


@settings(max_examples=200, deadline=None)
@given(v=arrays(float, st.integers(1, 12), elements=finite))
def test_project_simplex_properties(v):
    p = project_simplex(v)
    assert SimplexWeights(p).is_feasible()
    np.testing.assert_allclose(project_simplex(p), p, atol=1e-12)
    # no simplex vertex is closer than the projection
    d = np.linalg.norm(v - p)
    for j in range(v.size):
        assert d <= np.linalg.norm(v - np.eye(v.size)[j]) + 1e-9


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), m=st.integers(2, 9))
def test_convex_hull_containment(seed, m):
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((3, m))
    y = interpolate(W, rng.dirichlet(np.ones(m)))
    assert np.all(y >= W.min(axis=1) - 1e-12) and np.all(y <= W.max(axis=1) + 1e-12)


def test_simplex_weights_tolerance():
    assert SimplexWeights([0.5, 0.5 + 5e-9]).is_feasible()
    assert not SimplexWeights([0.5, 0.6]).is_feasible()
    assert not SimplexWeights([1.1, -0.1]).is_feasible()


def test_bundle_column_counts_checked():
    with pytest.raises(DimensionError):
        KnotBundle(np.zeros((1, 3)), np.zeros((1, 2)), np.zeros((1, 3)), np.zeros((1, 3)), np.zeros((0, 3)))


def test_single_sample_bundle_matches_evaluators():
    p = double_integrator_obstacles()
    x, u = np.array([0.5, 0.2, 0.1, -0.3]), np.array([0.4, -0.2])
    b = assemble_bundle([x], [u], p, knot=3)
    assert b.m == 1
    np.testing.assert_array_equal(b.W_f[:, 0], p.dynamics(x, u))
    np.testing.assert_array_equal(b.W_r[:, 0], p.residual(x, u, 3))
    np.testing.assert_array_equal(b.W_c[:, 0], p.constraint(x, u, 3))


def test_bundle_columns_match_serial_reevaluation(rng):
    p = double_integrator_obstacles()
    xs = rng.standard_normal((3, 4))
    us = rng.standard_normal((3, 2))
    b = assemble_bundle(xs, us, p, knot=0)
    for i in range(3):
        np.testing.assert_array_equal(b.W_f[:, i], p.dynamics(xs[i], us[i]))
        # one-hot consistency
        e = np.eye(3)[i]
        np.testing.assert_array_equal(interpolate(b.W_f, e), p.dynamics(interpolate(b.W_x, e), interpolate(b.W_u, e)))


def test_bundle_parallel_equals_serial(rng):
    from concurrent.futures import ThreadPoolExecutor

    p = double_integrator_obstacles()
    xs, us = rng.standard_normal((9, 4)), rng.standard_normal((9, 2))
    with ThreadPoolExecutor(4) as ex:
        b1 = assemble_bundle(xs, us, p, 2, ex)
    b0 = assemble_bundle(xs, us, p, 2)
    for name in ("W_x", "W_u", "W_r", "W_f", "W_c"):
        np.testing.assert_array_equal(getattr(b0, name), getattr(b1, name))


def test_terminal_bundle_has_no_control_rows():
    p = double_integrator_obstacles()
    b = assemble_bundle(np.zeros((3, 4)), None, p, knot=p.N - 1)
    assert b.terminal and b.W_u.shape == (0, 3) and b.W_f.shape == (0, 3) and b.W_c.shape == (0, 3)


def test_nonfinite_evaluator_reports_knot_and_sample():
    def f(x, u):
        return np.array([np.nan]) if x[0] > 0.5 else x + u

    p = ProblemDefinition(
        name="bad",
        n_x=1,
        n_u=1,
        N=3,
        dt=1.0,
        x_init=np.zeros(1),
        dynamics=f,
        residual=lambda x, u, k: x,
        terminal_residual=lambda x: x,
    )
    with pytest.raises(EvaluatorError) as e:
        assemble_bundle([[0.0], [1.0]], [[0.0], [0.0]], p, knot=4)
    assert e.value.knot == 4 and e.value.sample == 1 and e.value.evaluator == "dynamics"


def test_interpolated_trajectory_examples():
    b1 = KnotBundle([[0.0, 2.0]], [[0.0, 0.0]], [[0.0, 0.0]], [[0.0, 0.0]], np.zeros((0, 2)))
    b2 = KnotBundle([[4.0, 6.0]], np.zeros((0, 2)), [[0.0, 0.0]], np.zeros((0, 2)), np.zeros((0, 2)), terminal=True)
    t = interpolated_trajectory([b1, b2], [SimplexWeights([0.5, 0.5])] * 2)
    np.testing.assert_allclose(t.states[:, 0], [1.0, 5.0])


def test_interpolated_trajectory_componentwise(rng):
    bundles, weights = [], []
    for k in range(4):
        m = 5
        term = k == 3
        bundles.append(
            KnotBundle(
                rng.standard_normal((2, m)),
                np.zeros((0, m)) if term else rng.standard_normal((1, m)),
                rng.standard_normal((1, m)),
                np.zeros((0, m)) if term else rng.standard_normal((2, m)),
                np.zeros((0, m)),
                terminal=term,
            )
        )
        weights.append(rng.dirichlet(np.ones(m)))
    t = interpolated_trajectory(bundles, weights)
    for k in range(4):
        np.testing.assert_array_equal(t.states[k], bundles[k].W_x @ weights[k])
    for k in range(3):
        np.testing.assert_array_equal(t.controls[k], bundles[k].W_u @ weights[k])

"""Trajectories, per-knot sample bundles and convex-combination evaluation.

A bundle stores ``m`` sampled inputs at one knot point together with the
dynamics, residual and constraint values at those inputs, one sample per
column. Any weight vector on the probability simplex then gives an affine
surrogate of every function: the interpolated input ``W_x @ a`` is paired with
the interpolated output ``W_f @ a``. For affine functions the pairing is exact.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DimensionError, EvaluatorError

if TYPE_CHECKING:
    from .problems.base import ProblemDefinition

FEAS_TOL = 1e-8


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DimensionError("array rank", ndim, arr.ndim)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``(N, n_x)`` and controls ``(N - 1, n_u)``."""

    states: np.ndarray
    controls: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        controls = np.asarray(self.controls, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if controls.ndim == 1:
            controls = controls[:, None] if controls.size else controls.reshape(len(states) - 1, 0)
        object.__setattr__(self, "states", _frozen(states, 2))
        object.__setattr__(self, "controls", _frozen(controls, 2))
        N = self.states.shape[0]
        if N < 1:
            raise DimensionError("knot count", ">= 1", N)
        if self.controls.shape[0] != N - 1:
            raise DimensionError("control count", N - 1, self.controls.shape[0])

    @property
    def N(self) -> int:
        return self.states.shape[0]

    @property
    def n_x(self) -> int:
        return self.states.shape[1]

    @property
    def n_u(self) -> int:
        return self.controls.shape[1]

    def copy_with(self, states=None, controls=None) -> "Trajectory":
        return Trajectory(
            self.states if states is None else states,
            self.controls if controls is None else controls,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.states.shape == other.states.shape
            and self.controls.shape == other.controls.shape
            and np.array_equal(self.states, other.states)
            and np.array_equal(self.controls, other.controls)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class KnotBundle:
    """Sample matrices for one knot; every matrix has ``m`` columns.

    The terminal knot carries no control, dynamics or path constraint, so its
    ``W_u``, ``W_f`` and ``W_c`` have zero rows.
    """

    W_x: np.ndarray
    W_u: np.ndarray
    W_r: np.ndarray
    W_f: np.ndarray
    W_c: np.ndarray
    knot: int = 0
    terminal: bool = False

    def __post_init__(self):
        for name in ("W_x", "W_u", "W_r", "W_f", "W_c"):
            object.__setattr__(self, name, _frozen(getattr(self, name), 2))
        m = self.W_x.shape[1]
        for name in ("W_u", "W_r", "W_f", "W_c"):
            cols = getattr(self, name).shape[1]
            if cols != m:
                raise DimensionError(f"{name} column count", m, cols)

    @property
    def m(self) -> int:
        return self.W_x.shape[1]


@dataclass(frozen=True, eq=False)
class SimplexWeights:
    """Interpolation weights on the probability simplex."""

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen(self.alpha, 1))

    def __len__(self) -> int:
        return self.alpha.size

    def is_feasible(self, tol: float = FEAS_TOL) -> bool:
        a = self.alpha
        return bool(a.size > 0 and a.min() >= -tol and abs(a.sum() - 1.0) <= tol)


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex (sort based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def interpolate(W, alpha) -> np.ndarray:
    """Return ``W @ alpha``."""
    W = np.asarray(W, dtype=float)
    a = alpha.alpha if isinstance(alpha, SimplexWeights) else np.asarray(alpha, dtype=float)
    if W.ndim != 2:
        raise DimensionError("sample matrix rank", 2, W.ndim)
    if a.shape != (W.shape[1],):
        raise DimensionError("weight length vs sample count", W.shape[1], a.shape[0] if a.ndim else a.shape)
    return W @ a


def _checked(value, evaluator: str, knot: int, sample: int) -> np.ndarray:
    out = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.all(np.isfinite(out)):
        raise EvaluatorError(evaluator, knot, sample, "non-finite output")
    return out


def _evaluate_sample(problem: "ProblemDefinition", knot: int, i: int, x, u):
    if u is None:
        r = _checked(problem.terminal_residual(x), "terminal_residual", knot, i)
        return r, None, None
    r = _checked(problem.residual(x, u, knot), "residual", knot, i)
    f = _checked(problem.dynamics(x, u), "dynamics", knot, i)
    if problem.n_c:
        c = _checked(problem.constraint(x, u, knot), "constraint", knot, i)
    else:
        c = np.zeros(0)
    return r, f, c


def assemble_bundle(
    samples_x: Sequence,
    samples_u: Sequence | None,
    problem: "ProblemDefinition",
    knot: int,
    executor: Executor | None = None,
) -> KnotBundle:
    """Evaluate the problem on every sample and stack results column-wise.

    ``samples_u=None`` marks the terminal knot, where only the terminal
    residual is evaluated. When ``executor`` is given the samples are
    evaluated through it; results are identical to serial evaluation since
    each column depends on its own sample only.
    """
    W_x = np.array(samples_x, dtype=float).reshape(len(samples_x), -1).T
    m = W_x.shape[1]
    if m < 1:
        raise DimensionError("sample count", ">= 1", m)
    if W_x.shape[0] != problem.n_x:
        raise DimensionError(f"state sample dimension at knot {knot}", problem.n_x, W_x.shape[0])
    terminal = samples_u is None
    if terminal:
        W_u = np.zeros((0, m))
        us = [None] * m
    else:
        W_u = np.array(samples_u, dtype=float).reshape(len(samples_u), -1).T
        if W_u.shape != (problem.n_u, m):
            raise DimensionError(f"control samples at knot {knot}", (problem.n_u, m), W_u.shape)
        us = [W_u[:, i] for i in range(m)]

    jobs = [(i, W_x[:, i], us[i]) for i in range(m)]
    if executor is None:
        results = [_evaluate_sample(problem, knot, i, x, u) for i, x, u in jobs]
    else:
        results = list(executor.map(lambda j: _evaluate_sample(problem, knot, *j), jobs))

    W_r = np.column_stack([r for r, _, _ in results])
    if terminal:
        W_f = np.zeros((0, m))
        W_c = np.zeros((0, m))
    else:
        W_f = np.column_stack([f for _, f, _ in results])
        if W_f.shape[0] != problem.n_x:
            raise DimensionError(f"dynamics output at knot {knot}", problem.n_x, W_f.shape[0])
        W_c = np.column_stack([c for _, _, c in results]) if problem.n_c else np.zeros((0, m))
    return KnotBundle(W_x, W_u, W_r, W_f, W_c, knot=knot, terminal=terminal)


def interpolated_trajectory(bundles: Sequence[KnotBundle], weights: Sequence) -> Trajectory:
    """Map per-knot weights back to states and controls."""
    if len(bundles) != len(weights):
        raise DimensionError("weights per knot", len(bundles), len(weights))
    states = [interpolate(b.W_x, w) for b, w in zip(bundles, weights)]
    controls = [interpolate(b.W_u, w) for b, w in zip(bundles[:-1], weights[:-1])]
    n_u = bundles[0].W_u.shape[0]
    return Trajectory(np.array(states), np.array(controls).reshape(len(bundles) - 1, n_u))

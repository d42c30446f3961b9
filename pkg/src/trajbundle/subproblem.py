"""Transcription of the bundled trajectory problem into a convex QP.

Decision vector layout (``xi``)::

    [alpha_0 | alpha_1 | ... | alpha_{N-1} | s_plus | s_minus | w]

with ``s_plus``/``s_minus`` of size ``(N-1)*n_x`` (dynamics slack split into
nonnegative parts) and ``w`` of size ``(N-1)*n_c``. The objective is
``xi' P xi + q' xi``, i.e. without the usual factor one half.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .bundle import KnotBundle, SimplexWeights
from .errors import DimensionError, StructureError
from .qp import MAX_ITER, NUMERICAL_FAILURE, OPTIMAL, IPMSettings, QPResult, QPSettings, solve_qp, solve_qp_ipm

__all__ = [
    "ConvexSubproblem",
    "SubproblemSolution",
    "transcribe",
    "solve",
    "solve_entropy_regularized",
    "solve_entropy_regularized_numeric",
    "dump_subproblem",
    "load_subproblem",
    "OPTIMAL",
    "MAX_ITER",
    "NUMERICAL_FAILURE",
]

DEFAULT_MU = 1e4


@dataclass(frozen=True)
class VariableLayout:
    alpha: tuple  # (start, stop) per knot
    s_plus: tuple
    s_minus: tuple
    w: tuple
    n_x: int
    n_c: int

    @property
    def size(self) -> int:
        return self.w[1]

    def to_dict(self) -> dict:
        return {
            "alpha": [list(a) for a in self.alpha],
            "s_plus": list(self.s_plus),
            "s_minus": list(self.s_minus),
            "w": list(self.w),
            "n_x": self.n_x,
            "n_c": self.n_c,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VariableLayout":
        return cls(
            alpha=tuple(tuple(a) for a in d["alpha"]),
            s_plus=tuple(d["s_plus"]),
            s_minus=tuple(d["s_minus"]),
            w=tuple(d["w"]),
            n_x=int(d["n_x"]),
            n_c=int(d["n_c"]),
        )


@dataclass(frozen=True, eq=False)
class ConvexSubproblem:
    """``min xi'P xi + q'xi  s.t.  A_eq xi = b_eq,  A_ineq xi >= b_ineq``."""

    P: sp.csc_matrix
    q: np.ndarray
    A_eq: sp.csc_matrix
    b_eq: np.ndarray
    A_ineq: sp.csc_matrix
    b_ineq: np.ndarray
    layout: VariableLayout
    mu: float = DEFAULT_MU

    @property
    def n_var(self) -> int:
        return self.q.size

    def objective(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(xi @ (self.P @ xi) + self.q @ xi)


@dataclass
class SubproblemSolution:
    weights: list
    dyn_slack: np.ndarray  # (N-1, n_x), s = s_plus - s_minus
    ineq_slack: np.ndarray  # (N-1, n_c)
    objective: float
    solver_status: str
    kkt_residuals: dict
    iterations: int = 0
    xi: np.ndarray | None = None
    residual_history: list = field(default_factory=list)
    qp: QPResult | None = None

    @property
    def dyn_slack_l1(self) -> float:
        return float(np.abs(self.dyn_slack).sum())

    @property
    def ineq_slack_l1(self) -> float:
        return float(np.abs(self.ineq_slack).sum())


def transcribe(bundles: Sequence[KnotBundle], mu: float, x_init) -> ConvexSubproblem:
    """Build the bundled convex QP for one iteration.

    The first bundle must have been sampled with its state pinned to
    ``x_init``; the initial condition is then satisfied by every simplex
    weight vector and needs no constraint row.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    N = len(bundles)
    if N < 1:
        raise DimensionError("knot count", ">= 1", N)
    n_x = bundles[0].W_x.shape[0]
    n_u = bundles[0].W_u.shape[0]
    n_c = bundles[0].W_c.shape[0]
    for k, b in enumerate(bundles):
        if b.W_x.shape[0] != n_x:
            raise DimensionError(f"state rows at knot {k}", n_x, b.W_x.shape[0])
        if k < N - 1:
            if b.W_u.shape[0] != n_u:
                raise DimensionError(f"control rows at knot {k}", n_u, b.W_u.shape[0])
            if b.W_f.shape[0] != n_x:
                raise DimensionError(f"dynamics rows at knot {k}", n_x, b.W_f.shape[0])
            if b.W_c.shape[0] != n_c:
                raise DimensionError(f"constraint rows at knot {k}", n_c, b.W_c.shape[0])

    x_init = np.atleast_1d(np.asarray(x_init, dtype=float))
    W0 = bundles[0].W_x
    if x_init.shape != (n_x,):
        raise DimensionError("x_init", (n_x,), x_init.shape)
    if not np.allclose(W0, x_init[:, None], rtol=0.0, atol=1e-12 * (1.0 + np.abs(x_init).max(initial=0.0))):
        raise StructureError("state samples at the first knot are not all equal to x_init")

    ms = [b.m for b in bundles]
    starts = np.concatenate([[0], np.cumsum(ms)])
    n_alpha = int(starts[-1])
    n_s = (N - 1) * n_x
    n_w = (N - 1) * n_c
    layout = VariableLayout(
        alpha=tuple((int(starts[k]), int(starts[k + 1])) for k in range(N)),
        s_plus=(n_alpha, n_alpha + n_s),
        s_minus=(n_alpha + n_s, n_alpha + 2 * n_s),
        w=(n_alpha + 2 * n_s, n_alpha + 2 * n_s + n_w),
        n_x=n_x,
        n_c=n_c,
    )
    nv = layout.size

    P = sp.block_diag([b.W_r.T @ b.W_r for b in bundles] + [sp.csc_matrix((2 * n_s + n_w, 2 * n_s + n_w))], format="csc")
    P = ((P + P.T) * 0.5).tocsc()
    q = np.zeros(nv)
    q[n_alpha:] = mu

    # equalities: dynamics coupling then sum-to-one rows
    rows = []
    eye_x = sp.identity(n_x, format="csc")
    for k in range(N - 1):
        a0, a1 = layout.alpha[k]
        b0, b1 = layout.alpha[k + 1]
        blk = sp.lil_matrix((n_x, nv))
        blk[:, a0:a1] = -bundles[k].W_f
        blk[:, b0:b1] = bundles[k + 1].W_x
        sp0 = layout.s_plus[0] + k * n_x
        sm0 = layout.s_minus[0] + k * n_x
        blk[:, sp0 : sp0 + n_x] = -eye_x
        blk[:, sm0 : sm0 + n_x] = eye_x
        rows.append(blk.tocsc())
    ones = sp.lil_matrix((N, nv))
    for k, (a0, a1) in enumerate(layout.alpha):
        ones[k, a0:a1] = 1.0
    rows.append(ones.tocsc())
    A_eq = sp.vstack(rows, format="csc")
    b_eq = np.concatenate([np.zeros(n_s), np.ones(N)])

    # inequalities: interpolated path constraints plus nonnegativity of everything
    irows = []
    if n_c:
        for k in range(N - 1):
            a0, a1 = layout.alpha[k]
            blk = sp.lil_matrix((n_c, nv))
            blk[:, a0:a1] = bundles[k].W_c
            w0 = layout.w[0] + k * n_c
            blk[:, w0 : w0 + n_c] = sp.identity(n_c)
            irows.append(blk.tocsc())
    irows.append(sp.identity(nv, format="csc"))
    A_ineq = sp.vstack(irows, format="csc")
    b_ineq = np.zeros(A_ineq.shape[0])
    return ConvexSubproblem(P, q, A_eq, b_eq, A_ineq, b_ineq, layout, float(mu))


QPBackend = Callable[..., QPResult]


def ipm_backend(P, q, A, b, G, h, tol: float, max_iter: int | None) -> QPResult:
    settings = IPMSettings(tol=tol) if max_iter is None else IPMSettings(tol=tol, max_iter=max_iter)
    return solve_qp_ipm(P, q, A, b, G, h, settings)


def admm_backend(P, q, A, b, G, h, tol: float, max_iter: int | None) -> QPResult:
    M = sp.vstack([A, G], format="csc")
    l = np.concatenate([b, h])
    u = np.concatenate([b, np.full(h.size, np.inf)])
    settings = QPSettings(tol=tol) if max_iter is None else QPSettings(tol=tol, max_iter=max_iter)
    res = solve_qp(P, q, M, l, u, settings)
    # box-form multipliers have the opposite sign convention
    res.y = -res.y
    return res


BACKENDS = {"ipm": ipm_backend, "admm": admm_backend}


def solve(
    sp_: ConvexSubproblem,
    tol: float = 1e-8,
    max_iter: int | None = None,
    backend: str | QPBackend = "ipm",
) -> SubproblemSolution:
    """Solve a transcribed subproblem; never raises on numerical trouble.

    ``backend`` names a built-in solver (``"ipm"`` or ``"admm"``) or is a
    callable receiving ``(P, q, A_eq, b_eq, G, h, tol, max_iter)`` for
    ``min 0.5 x'Px + q'x  s.t.  A_eq x = b_eq, G x >= h`` and returning a
    :class:`~trajbundle.qp.QPResult`. ``max_iter=None`` uses the solver's
    own default.
    """
    fn = BACKENDS[backend] if isinstance(backend, str) else backend
    try:
        res = fn(2.0 * sp_.P, sp_.q, sp_.A_eq, sp_.b_eq, sp_.A_ineq, sp_.b_ineq, tol, max_iter)
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        res = QPResult(
            x=np.zeros(sp_.n_var), y=np.zeros(sp_.b_eq.size + sp_.b_ineq.size), status=NUMERICAL_FAILURE,
            iterations=0, prim_res=float("inf"), dual_res=float("inf"), objective=float("nan"), message=str(exc),
        )
    return _unpack(sp_, res)


def _unpack(sp_: ConvexSubproblem, res: QPResult) -> SubproblemSolution:
    L = sp_.layout
    xi = res.x
    weights = [SimplexWeights(xi[a0:a1]) for a0, a1 in L.alpha]
    N = len(L.alpha)
    s = (xi[L.s_plus[0] : L.s_plus[1]] - xi[L.s_minus[0] : L.s_minus[1]]).reshape(N - 1, L.n_x)
    w = xi[L.w[0] : L.w[1]].reshape(N - 1, L.n_c)
    obj = sp_.objective(xi) if res.status != NUMERICAL_FAILURE else float("nan")
    return SubproblemSolution(
        weights=weights,
        dyn_slack=s,
        ineq_slack=w,
        objective=obj,
        solver_status=res.status,
        kkt_residuals={"primal": res.prim_res, "dual": res.dual_res},
        iterations=res.iterations,
        xi=xi,
        residual_history=res.residual_history,
        qp=res,
    )


def solve_entropy_regularized(costs, lam: float) -> SimplexWeights:
    """Minimizer of ``J'a + lam * sum(a log a)`` over the simplex.

    ``lam > 0`` gives the softmax of ``-J / lam``; ``lam == 0`` puts all weight
    on the cheapest sample (lowest index on ties). Entries equal to ``+inf``
    receive zero weight.
    """
    J = np.asarray(costs, dtype=float)
    if J.ndim != 1 or J.size == 0:
        raise DimensionError("cost vector", "non-empty 1-D", J.shape)
    if np.any(np.isnan(J)) or np.any(J == -np.inf):
        raise ValueError("costs must be finite or +inf")
    if lam < 0:
        raise ValueError(f"temperature must be non-negative, got {lam}")
    finite = np.isfinite(J)
    if not finite.any():
        raise ValueError("all costs are +inf; no sample to weight")
    if lam == 0:
        a = np.zeros(J.size)
        a[int(np.argmin(J))] = 1.0
        return SimplexWeights(a)
    z = np.where(finite, -(J - J[finite].min()) / lam, -np.inf)
    e = np.exp(z)
    return SimplexWeights(e / e.sum())


def solve_entropy_regularized_numeric(
    costs, lam: float, tol: float = 1e-14, max_iter: int = 500
) -> SimplexWeights:
    """Generic equality-constrained Newton solve of the entropy-regularized problem.

    Independent of the closed form: a feasible-start Newton method with a
    fraction-to-boundary rule and Armijo backtracking, stopped on the Newton
    decrement.
    """
    J = np.asarray(costs, dtype=float)
    if lam <= 0:
        raise ValueError("numeric solve requires lam > 0")
    m = J.size
    a = np.full(m, 1.0 / m)

    def phi(v):
        return float(J @ v + lam * np.sum(v * np.log(v)))

    f = phi(a)
    for _ in range(max_iter):
        g = J + lam * (1.0 + np.log(a))
        gbar = a @ g
        d = -a * (g - gbar) / lam
        dec2 = float(np.sum(d * d * lam / a))
        if dec2 / 2.0 <= tol:
            break
        neg = d < 0
        t = min(1.0, 0.99 * float(np.min(-a[neg] / d[neg]))) if neg.any() else 1.0
        slope = float(g @ d)
        while True:
            cand = a + t * d
            fc = phi(cand)
            if fc <= f + 0.25 * t * slope or t < 1e-16:
                break
            t *= 0.5
        a = cand / cand.sum()
        f = phi(a)
    return SimplexWeights(a)


def dump_subproblem(sp_: ConvexSubproblem, path) -> None:
    """Write a self-describing JSON file (dense, row-major) for cross-checking solvers."""
    doc = {
        "format": "trajbundle.convex_subproblem",
        "version": 1,
        "objective": "xi' P xi + q' xi",
        "n_var": sp_.n_var,
        "n_eq": int(sp_.b_eq.size),
        "n_ineq": int(sp_.b_ineq.size),
        "mu": sp_.mu,
        "P": sp_.P.toarray().tolist(),
        "q": sp_.q.tolist(),
        "A_eq": sp_.A_eq.toarray().tolist(),
        "b_eq": sp_.b_eq.tolist(),
        "A_ineq": sp_.A_ineq.toarray().tolist(),
        "b_ineq": sp_.b_ineq.tolist(),
        "layout": sp_.layout.to_dict(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_subproblem(path) -> ConvexSubproblem:
    with open(path) as fh:
        doc = json.load(fh)
    n = doc["n_var"]

    def mat(key, rows):
        return sp.csc_matrix(np.asarray(doc[key], dtype=float).reshape(rows, n))

    return ConvexSubproblem(
        P=mat("P", n),
        q=np.asarray(doc["q"], dtype=float),
        A_eq=mat("A_eq", doc["n_eq"]),
        b_eq=np.asarray(doc["b_eq"], dtype=float),
        A_ineq=mat("A_ineq", doc["n_ineq"]),
        b_ineq=np.asarray(doc["b_ineq"], dtype=float),
        layout=VariableLayout.from_dict(doc["layout"]),
        mu=float(doc["mu"]),
    )

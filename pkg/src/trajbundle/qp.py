"""Convex quadratic programming solvers.

Two methods are provided. :class:`InteriorPointSolver` (the default) handles::

    minimize    0.5 x'Px + q'x
    subject to  A x = b,  G x >= h

with a Mehrotra predictor-corrector method. :class:`ADMMSolver` handles::

    minimize    0.5 x'Px + q'x
    subject to  l <= Ax <= u

by operator splitting. Its iteration alternates a projection onto the affine set ``{(x, z): Ax = z}``
(one cached sparse factorization per step size) with a projection of ``z`` onto
the box ``[l, u]``. Data are Ruiz-equilibrated first and the step size is
adapted from the primal/dual residual balance. Once the splitting iterates are
moderately accurate the active set is guessed from them and the reduced KKT
system is solved directly ("polishing"), which typically recovers the exact
optimum to round-off. If polishing fails the splitting continues at a tighter
tolerance.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
MAX_ITER = "max_iter"
NUMERICAL_FAILURE = "numerical_failure"

_EQ_RHO_SCALE = 1e3
_RHO_MIN, _RHO_MAX = 1e-6, 1e6
_INF = 1e20


@dataclass
class QPSettings:
    tol: float = 1e-8
    max_iter: int = 50_000
    rho: float = 0.1
    sigma: float = 1e-6
    relax: float = 1.6
    scaling_iter: int = 10
    check_interval: int = 25
    adaptive_rho_tolerance: float = 5.0
    eps_start: float = 1e-4
    polish: bool = True
    polish_delta: float = 1e-9
    polish_refine_iter: int = 5
    record_merit: bool = False


@dataclass
class QPResult:
    x: np.ndarray
    y: np.ndarray
    status: str
    iterations: int
    prim_res: float
    dual_res: float
    objective: float
    polished: bool = False
    residual_history: list = field(default_factory=list)
    merit_history: list = field(default_factory=list)
    rho_updates: list = field(default_factory=list)
    message: str = ""


def _col_inf_norm(M: sp.csc_matrix) -> np.ndarray:
    M = abs(M).tocsc()
    out = np.zeros(M.shape[1])
    if M.nnz:
        nz = np.diff(M.indptr) > 0
        out[nz] = np.maximum.reduceat(M.data, M.indptr[:-1][nz])
    return out


def _row_inf_norm(M: sp.csc_matrix) -> np.ndarray:
    return _col_inf_norm(M.T.tocsc())


def _inf(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


class ADMMSolver:
    def __init__(self, P, q, A, l, u, settings: QPSettings | None = None):
        self.settings = settings or QPSettings()
        self.P0 = sp.csc_matrix(P, dtype=float)
        self.q0 = np.asarray(q, dtype=float).copy()
        self.A0 = sp.csc_matrix(A, dtype=float)
        self.l0 = np.maximum(np.asarray(l, dtype=float), -_INF)
        self.u0 = np.minimum(np.asarray(u, dtype=float), _INF)
        self.n = self.q0.size
        self.m = self.l0.size
        if self.P0.shape != (self.n, self.n):
            raise ValueError(f"P shape {self.P0.shape} does not match q length {self.n}")
        if self.A0.shape != (self.m, self.n):
            raise ValueError(f"A shape {self.A0.shape} does not match ({self.m}, {self.n})")
        if np.any(self.l0 > self.u0):
            raise ValueError("l > u for some constraint rows")
        self._scale()

    # -- data equilibration -------------------------------------------------
    def _scale(self) -> None:
        s = self.settings
        P, A, q = self.P0.copy(), self.A0.copy(), self.q0.copy()
        D = np.ones(self.n)
        E = np.ones(self.m)
        c = 1.0
        for _ in range(s.scaling_iter):
            d = np.maximum(_col_inf_norm(P), _col_inf_norm(A)) if self.m else _col_inf_norm(P)
            e = _row_inf_norm(A) if self.m else np.zeros(0)
            d = 1.0 / np.sqrt(np.clip(np.where(d == 0, 1.0, d), 1e-4, 1e4))
            e = 1.0 / np.sqrt(np.clip(np.where(e == 0, 1.0, e), 1e-4, 1e4))
            Dm, Em = sp.diags(d), sp.diags(e)
            P = (Dm @ P @ Dm).tocsc()
            A = (Em @ A @ Dm).tocsc()
            q = d * q
            D *= d
            E *= e
            pn = _col_inf_norm(P).mean() if self.n else 0.0
            g = max(pn, _inf(q))
            g = 1.0 if g == 0 else 1.0 / np.clip(g, 1e-4, 1e4)
            P = P * g
            q = q * g
            c *= g
        self.P, self.A, self.q, self.D, self.E, self.c = P.tocsc(), A.tocsc(), q, D, E, c
        self.l = np.where(self.l0 <= -_INF, -_INF, self.l0 * E)
        self.u = np.where(self.u0 >= _INF, _INF, self.u0 * E)
        self.AT = self.A.T.tocsc()
        self.is_eq = np.abs(self.u0 - self.l0) < 1e-12 * np.maximum(1.0, np.abs(self.l0))
        self.is_free = (self.l0 <= -_INF) & (self.u0 >= _INF)

    def _rho_vec(self, rho: float) -> np.ndarray:
        r = np.full(self.m, rho)
        r[self.is_eq] = rho * _EQ_RHO_SCALE
        r[self.is_free] = _RHO_MIN
        return r

    def _factor(self, rho_vec: np.ndarray):
        K = self.P + self.settings.sigma * sp.eye(self.n, format="csc")
        if self.m:
            K = K + self.AT @ sp.diags(rho_vec) @ self.A
        return spla.splu(K.tocsc(), permc_spec="COLAMD")

    # -- residuals in original units ------------------------------------------
    def _unscale(self, x, z, y):
        return self.D * x, z / self.E, self.E * y / self.c

    def _residuals(self, x, y, z=None):
        """Unscaled primal/dual residuals of an (x, y) pair in original units."""
        Ax = self.A0 @ x
        if z is None:
            z = np.clip(Ax, self.l0, self.u0)
        prim = _inf(Ax - z)
        Px = self.P0 @ x
        ATy = self.A0.T @ y
        dual = _inf(Px + self.q0 + ATy)
        return prim, dual, Ax, z, Px, ATy

    def objective(self, x) -> float:
        return float(0.5 * x @ (self.P0 @ x) + self.q0 @ x)

    # -- polishing ------------------------------------------------------------
    def _polish(self, x, z, y):
        s = self.settings
        low = (z - self.l < -y) | self.is_eq
        up = (self.u - z < y) & ~low
        act = np.nonzero(low | up)[0]
        Ared = self.A[act]
        b = np.where(low[act], self.l[act], self.u[act])
        k = act.size
        KKT0 = sp.bmat([[self.P, Ared.T], [Ared, None]], format="csc") if k else self.P.tocsc()
        d = s.polish_delta
        reg = sp.diags(np.concatenate([np.full(self.n, d), np.full(k, -d)]))
        try:
            lu = spla.splu((KKT0 + reg).tocsc(), permc_spec="COLAMD")
        except RuntimeError:
            return None
        rhs = np.concatenate([-self.q, b])
        sol = lu.solve(rhs)
        for _ in range(s.polish_refine_iter):
            sol = sol + lu.solve(rhs - KKT0 @ sol)
        if not np.all(np.isfinite(sol)):
            return None
        xp = sol[: self.n]
        yp = np.zeros(self.m)
        yp[act] = sol[self.n :]
        x0, _, y0 = self._unscale(xp, np.zeros(self.m), yp)
        prim, dual, *_ = self._residuals(x0, y0)
        # dual sign: lower-active multipliers <= 0, upper-active >= 0
        lo_only = low & ~self.is_eq
        sign_viol = max(float(np.max(y0[lo_only], initial=0.0)), float(np.max(-y0[up], initial=0.0)))
        return x0, y0, prim, max(dual, sign_viol)

    # -- main loop ------------------------------------------------------------
    def solve(self, x0=None, y0=None) -> QPResult:
        s = self.settings
        n, m = self.n, self.m
        x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float) / self.D
        z = self.A @ x if m else np.zeros(0)
        z = np.clip(z, self.l, self.u)
        y = np.zeros(m) if y0 is None else np.asarray(y0, dtype=float) * self.c / self.E
        rho = s.rho
        rho_vec = self._rho_vec(rho)
        try:
            lu = self._factor(rho_vec)
        except RuntimeError as exc:
            return self._failure(x, z, y, 0, [], f"factorization failed: {exc}")

        eps = max(s.eps_start, s.tol)
        history: list = []
        merit: list = []
        rho_updates: list = []
        best = None
        polish_tries = 0
        it = 0
        for it in range(1, s.max_iter + 1):
            x_prev, z_prev, y_prev = x, z, y
            rhs = s.sigma * x - self.q
            if m:
                rhs = rhs + self.AT @ (rho_vec * z - y)
            xt = lu.solve(rhs)
            zt = self.A @ xt
            x = s.relax * xt + (1.0 - s.relax) * x_prev
            zr = s.relax * zt + (1.0 - s.relax) * z_prev
            z = np.clip(zr + y_prev / rho_vec, self.l, self.u)
            y = y_prev + rho_vec * (zr - z)
            if s.record_merit:
                # fixed-point residual of the underlying averaged operator
                merit.append(
                    float(
                        np.sqrt(
                            s.sigma * np.sum((x - x_prev) ** 2)
                            + np.sum(rho_vec * (z - z_prev) ** 2)
                            + np.sum((y - y_prev) ** 2 / rho_vec)
                        )
                    )
                )

            if it % s.check_interval and it != s.max_iter:
                continue
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
                return self._failure(x, z, y, it, history, "non-finite iterate")

            xu, zu, yu = self._unscale(x, z, y)
            prim, dual, Ax, _, Px, ATy = self._residuals(xu, yu, zu)
            history.append((it, prim, dual))
            if best is None or max(prim, dual) < max(best[3], best[4]):
                best = (xu.copy(), yu.copy(), it, prim, dual)
            eps_p = eps + eps * max(_inf(Ax), _inf(zu))
            eps_d = eps + eps * max(_inf(Px), _inf(ATy), _inf(self.q0))
            if prim <= s.tol and dual <= s.tol:
                return self._done(xu, yu, OPTIMAL, it, prim, dual, history, merit, rho_updates, False)
            if prim <= eps_p and dual <= eps_d:
                if s.polish:
                    polish_tries += 1
                    res = self._polish(x, z, y)
                    if res is not None:
                        xp, yp, pp, dp = res
                        if pp <= s.tol and dp <= s.tol:
                            return self._done(xp, yp, OPTIMAL, it, pp, dp, history, merit, rho_updates, True)
                eps = max(eps * 0.1, s.tol)

            # step-size adaptation from residual balance (scaled quantities)
            Axs = self.A @ x
            ps = _inf(Axs - z) / max(_inf(Axs), _inf(z), 1e-30)
            ds = _inf(self.P @ x + self.q + self.AT @ y) / max(
                _inf(self.P @ x), _inf(self.AT @ y), _inf(self.q), 1e-30
            )
            if m and ps > 0 and ds > 0:
                new_rho = float(np.clip(rho * np.sqrt(ps / ds), _RHO_MIN, _RHO_MAX))
                t = s.adaptive_rho_tolerance
                if new_rho > rho * t or new_rho < rho / t:
                    rho = new_rho
                    rho_vec = self._rho_vec(rho)
                    try:
                        lu = self._factor(rho_vec)
                    except RuntimeError as exc:
                        return self._failure(x, z, y, it, history, f"refactorization failed: {exc}")
                    rho_updates.append(it)

        # budget exhausted: final polish attempt, else best iterate seen
        if s.polish:
            res = self._polish(x, z, y)
            if res is not None and res[2] <= s.tol and res[3] <= s.tol:
                return self._done(res[0], res[1], OPTIMAL, it, res[2], res[3], history, merit, rho_updates, True)
        xb, yb, _, pb, db = best
        return self._done(xb, yb, MAX_ITER, it, pb, db, history, merit, rho_updates, False)

    def _done(self, x, y, status, it, prim, dual, history, merit, rho_updates, polished) -> QPResult:
        return QPResult(
            x=x,
            y=y,
            status=status,
            iterations=it,
            prim_res=prim,
            dual_res=dual,
            objective=self.objective(x),
            polished=polished,
            residual_history=history,
            merit_history=merit,
            rho_updates=rho_updates,
        )

    def _failure(self, x, z, y, it, history, message) -> QPResult:
        log.warning("QP solve failed after %d iterations: %s", it, message)
        xu, _, yu = self._unscale(x, z, y)
        xu = np.where(np.isfinite(xu), xu, 0.0)
        yu = np.where(np.isfinite(yu), yu, 0.0)
        return QPResult(
            x=xu,
            y=yu,
            status=NUMERICAL_FAILURE,
            iterations=it,
            prim_res=float("inf"),
            dual_res=float("inf"),
            objective=float("nan"),
            residual_history=history,
            message=message,
        )


def solve_qp(P, q, A, l, u, settings: QPSettings | None = None, **kwargs) -> QPResult:
    """Convenience wrapper around :class:`ADMMSolver`."""
    if settings is None:
        settings = QPSettings(**kwargs)
    return ADMMSolver(P, q, A, l, u, settings).solve()


# ---------------------------------------------------------------------------
# interior point
# ---------------------------------------------------------------------------


DENSE_MAX = 400  # KKT size up to which the interior point method factors densely


@dataclass
class IPMSettings:
    tol: float = 1e-8
    max_iter: int = 100
    scaling_iter: int = 10
    reg: float = 1e-10
    refine_iter: int = 10
    step_fraction: float = 0.99
    record_merit: bool = True


def _ruiz(P, q, M, iters: int):
    """Equilibrate ``[[P, M'], [M, 0]]``; returns scaled data and (D, E, c).

    Works on the stored entries directly; each sweep rescales by the square
    roots of the column (and row) infinity norms.
    """
    n, m = P.shape[0], M.shape[0]
    D, E, c = np.ones(n), np.ones(m), 1.0
    P, M, q = sp.csc_matrix(P, copy=True), sp.csc_matrix(M, copy=True), q.copy()
    P.sum_duplicates()
    M.sum_duplicates()
    p_row, p_col = P.indices, np.repeat(np.arange(n), np.diff(P.indptr))
    m_row, m_col = M.indices, np.repeat(np.arange(n), np.diff(M.indptr))

    def col_norm(data, cols, size):
        out = np.zeros(size)
        np.maximum.at(out, cols, np.abs(data))
        return out

    def clipped(v):
        return 1.0 / np.sqrt(np.clip(np.where(v == 0, 1.0, v), 1e-4, 1e4))

    for _ in range(iters):
        d = np.maximum(col_norm(P.data, p_col, n), col_norm(M.data, m_col, n))
        d = clipped(d)
        e = clipped(col_norm(M.data, m_row, m))
        P.data *= d[p_row] * d[p_col]
        M.data *= e[m_row] * d[m_col]
        q = d * q
        D *= d
        E *= e
        g = max(col_norm(P.data, p_col, n).mean() if n else 0.0, _inf(q))
        g = 1.0 if g == 0 else 1.0 / np.clip(g, 1e-4, 1e4)
        P.data *= g
        q, c = q * g, c * g
    return P, q, M, D, E, c


def _max_step(v, dv) -> float:
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


class InteriorPointSolver:
    """Primal-dual path-following method with Mehrotra's corrector.

    Each iteration factors the regularized quasi-definite KKT matrix
    ``[[P + G'WG + rI, A'], [A, -rI]]`` (``W = Z S^-1``) once and reuses it
    for the predictor and corrector solves, with a few steps of iterative
    refinement against the unregularized matrix. The linear (primal and
    dual) residuals shrink by ``1 - step`` every iteration, so their
    maximum is a nonincreasing merit sequence.
    """

    def __init__(self, P, q, A, b, G, h, settings: IPMSettings | None = None):
        self.settings = s = settings or IPMSettings()
        self.P0 = sp.csc_matrix(P, dtype=float)
        self.q0 = np.asarray(q, dtype=float).copy()
        self.n = self.q0.size
        self.A0 = sp.csc_matrix(A, dtype=float) if A is not None else sp.csc_matrix((0, self.n))
        self.b0 = np.asarray(b, dtype=float).copy() if b is not None else np.zeros(0)
        self.G0 = sp.csc_matrix(G, dtype=float) if G is not None else sp.csc_matrix((0, self.n))
        self.h0 = np.asarray(h, dtype=float).copy() if h is not None else np.zeros(0)
        self.me, self.mi = self.b0.size, self.h0.size
        if self.P0.shape != (self.n, self.n):
            raise ValueError(f"P shape {self.P0.shape} does not match q length {self.n}")
        if self.A0.shape != (self.me, self.n) or self.G0.shape != (self.mi, self.n):
            raise ValueError("constraint matrix shapes do not match right-hand sides")
        M = sp.vstack([self.A0, self.G0], format="csc")
        self.P, self.q, M, self.D, E, self.c = _ruiz(self.P0, self.q0, M, s.scaling_iter)
        self.Ea, self.Eg = E[: self.me], E[self.me :]
        self.A = M[: self.me].tocsc()
        self.G = M[self.me :].tocsc()
        self.b = self.b0 * self.Ea
        self.h = self.h0 * self.Eg
        self.AT = self.A.T.tocsc()
        self.GT = self.G.T.tocsc()
        # small KKT systems factor faster as dense arrays
        self.dense = self.n + self.me <= DENSE_MAX
        if self.dense:
            self.Pd, self.Ad, self.Gd = self.P.toarray(), self.A.toarray(), self.G.toarray()

    def objective(self, x) -> float:
        return float(0.5 * x @ (self.P0 @ x) + self.q0 @ x)

    def _unscaled_residuals(self, x, y, z):
        """Scale-normalized primal and dual residuals in original units.

        Primal covers equality violation and inequality shortfall, divided by
        ``1 + max(|b|, |h|)``; dual is the stationarity residual divided by
        ``1 + |q|``.
        """
        xu = self.D * x
        yu = self.Ea * y / self.c
        zu = self.Eg * z / self.c
        prim = max(_inf(self.A0 @ xu - self.b0), _inf(np.maximum(self.h0 - self.G0 @ xu, 0.0)))
        dual = _inf(self.P0 @ xu + self.q0 - self.A0.T @ yu - self.G0.T @ zu)
        prim /= 1.0 + max(_inf(self.b0), _inf(self.h0))
        dual /= 1.0 + _inf(self.q0)
        return xu, yu, zu, prim, dual

    def _factor(self, w):
        s = self.settings
        n, me = self.n, self.me
        sign = np.concatenate([np.ones(n), -np.ones(me)])
        if self.dense:
            K0 = np.zeros((n + me, n + me))
            K0[:n, :n] = self.Pd + (self.Gd.T * w) @ self.Gd
            K0[:n, n:] = self.Ad.T
            K0[n:, :n] = self.Ad
        else:
            H = self.P + self.GT @ sp.diags(w) @ self.G
            K0 = sp.bmat([[H, self.AT], [self.A, None]], format="csc") if me else H.tocsc()
        r = s.reg
        while True:
            # escalate the regularization on a zero pivot; refinement below
            # solves against the unregularized matrix regardless
            try:
                lu_solve = self._lu(K0, r * sign)
                break
            except RuntimeError:
                if r >= 1e-4:
                    raise
                r *= 100.0

        def solve(rhs):
            sol = lu_solve(rhs)
            res = rhs - K0 @ sol
            rn = _inf(res)
            for _ in range(s.refine_iter):
                cand = sol + lu_solve(res)
                cres = rhs - K0 @ cand
                cn = _inf(cres)
                if not cn < rn:
                    break
                sol, res, rn = cand, cres, cn
            return sol

        return solve

    def _lu(self, K0, shift):
        if not self.dense:
            return spla.splu((K0 + sp.diags(shift)).tocsc(), permc_spec="COLAMD").solve
        K = K0 + np.diag(shift)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(K, check_finite=False)
        if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0.0):
            raise RuntimeError("Factor is exactly singular")
        return lambda rhs: sla.lu_solve((lu, piv), rhs, check_finite=False)

    def _newton(self, kkt, s, z, r_d, r_p, r_g, r_c):
        n = self.n
        rhs1 = -r_d - self.GT @ ((r_c + z * r_g) / s)
        sol = kkt(np.concatenate([rhs1, -r_p]))
        dx = sol[:n]
        dy = -sol[n:]
        ds = self.G @ dx + r_g
        dz = -(r_c + z * ds) / s
        return dx, dy, ds, dz

    def solve(self) -> QPResult:
        st = self.settings
        n, me, mi = self.n, self.me, self.mi
        history: list = []
        merit: list = []

        # starting point from a least-squares-like KKT solve
        try:
            kkt = self._factor(np.ones(mi))
        except RuntimeError as exc:
            return self._failure(np.zeros(n), np.zeros(me), np.zeros(mi), 0, history, merit, f"factorization: {exc}")
        sol = kkt(np.concatenate([-self.q + self.GT @ self.h, self.b]))
        x = sol[:n]
        y = -sol[n:]
        s = self.G @ x - self.h
        z = np.ones(mi)
        if mi:
            s = s + max(-1.5 * float(s.min()), 0.0)
            s = np.maximum(s, 1e-4)
            s = s + 0.5 * (s @ z) / z.sum()
            z = z + 0.5 * (s @ z) / s.sum()

        best = None
        it = 0
        for it in range(0, st.max_iter + 1):
            r_d = self.P @ x + self.q - self.AT @ y - self.GT @ z
            r_p = self.A @ x - self.b
            r_g = self.G @ x - s - self.h
            mu = float(s @ z) / mi if mi else 0.0
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z)) and np.isfinite(mu)):
                return self._failure(x, y, z, it, history, merit, "non-finite iterate")

            xu, yu, zu, prim, dual = self._unscaled_residuals(x, y, z)
            gap = float(np.maximum(self.G0 @ xu - self.h0, 0.0) @ zu) if mi else 0.0
            obj = self.objective(xu)
            history.append((it, prim, dual, gap))
            if st.record_merit:
                merit.append(max(_inf(r_d), _inf(r_p), _inf(r_g)))
            score = max(prim, dual, gap / (1.0 + abs(obj)))
            if best is None or score < best[0]:
                best = (score, xu, yu, zu, prim, dual, it)
            if prim <= st.tol and dual <= st.tol and gap <= st.tol * (1.0 + abs(obj)):
                return self._result(xu, yu, zu, OPTIMAL, it, prim, dual, history, merit)
            if it == st.max_iter:
                break

            w = z / s
            try:
                kkt = self._factor(w)
            except RuntimeError as exc:
                return self._failure(x, y, z, it, history, merit, f"factorization: {exc}")

            # predictor
            dx, dy, ds, dz = self._newton(kkt, s, z, r_d, r_p, r_g, s * z)
            a_aff = min(1.0, _max_step(s, ds), _max_step(z, dz))
            mu_aff = float((s + a_aff * ds) @ (z + a_aff * dz)) / mi if mi else 0.0
            sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
            # corrector
            r_c = s * z + ds * dz - sigma * mu
            dx, dy, ds, dz = self._newton(kkt, s, z, r_d, r_p, r_g, r_c)
            alpha = min(1.0, st.step_fraction * min(_max_step(s, ds), _max_step(z, dz)))
            x = x + alpha * dx
            y = y + alpha * dy
            s = s + alpha * ds
            z = z + alpha * dz
            if alpha < 1e-10:
                return self._fallback(best, it, history, merit, "step size collapsed")

        return self._fallback(best, it, history, merit, "iteration limit")

    def _fallback(self, best, it, history, merit, reason) -> QPResult:
        """Return the best iterate seen, graded by how close it is to optimal."""
        score, xu, yu, zu, prim, dual, _ = best
        tol = self.settings.tol
        if score <= tol:
            status = OPTIMAL
        elif score <= np.sqrt(tol) or reason == "iteration limit":
            status = MAX_ITER
        else:
            return self._failure(xu / self.D, np.zeros(self.me), np.zeros(self.mi), it, history, merit, reason)
        return self._result(xu, yu, zu, status, it, prim, dual, history, merit, reason)

    def _result(self, xu, yu, zu, status, it, prim, dual, history, merit, message="") -> QPResult:
        return QPResult(
            x=xu,
            y=np.concatenate([yu, zu]),
            status=status,
            iterations=it,
            prim_res=prim,
            dual_res=dual,
            objective=self.objective(xu),
            residual_history=history,
            merit_history=merit,
            message=message,
        )

    def _failure(self, x, y, z, it, history, merit, message) -> QPResult:
        log.warning("interior point solve failed after %d iterations: %s", it, message)
        xu = np.where(np.isfinite(x), self.D * x, 0.0)
        res = self._result(xu, np.zeros(self.me), np.zeros(self.mi), NUMERICAL_FAILURE, it, np.inf, np.inf, history, merit, message)
        res.objective = float("nan")
        return res


def solve_qp_ipm(P, q, A, b, G, h, settings: IPMSettings | None = None, **kwargs) -> QPResult:
    """``min 0.5 x'Px + q'x  s.t.  Ax = b, Gx >= h`` by interior point."""
    if settings is None:
        settings = IPMSettings(**kwargs)
    return InteriorPointSolver(P, q, A, b, G, h, settings).solve()

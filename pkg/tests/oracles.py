"""Independent reference computations used by the tests."""

import numpy as np


def simplex_grid(resolution: float = 1e-3) -> np.ndarray:
    """All points of the 2-simplex whose coordinates are multiples of ``resolution``."""
    n = int(round(1.0 / resolution))
    i, j = np.triu_indices(n + 1)
    # (i, j - i, n - j) enumerates every composition of n into three parts
    return np.stack([i, j - i, n - j], axis=1).astype(float) / n


def brute_force_two_knot(W_r0, W_f0, W_c0, W_x1, W_r1, mu, resolution=1e-3) -> float:
    """Grid minimum of the two-knot bundled objective with scalar state.

    For fixed weights the optimal slacks are explicit, so the objective is
    ``F0(a0) + F1(a1) + mu |W_x1 a1 - W_f0 a0|``. The inner minimum over the
    second grid is exact via prefix/suffix minima after sorting by
    ``W_x1 a1``.
    """
    G = simplex_grid(resolution)
    R0 = G @ np.asarray(W_r0).T
    F0 = np.sum(R0 * R0, axis=1)
    if np.size(W_c0):
        F0 = F0 + mu * np.sum(np.maximum(-(G @ np.asarray(W_c0).T), 0.0), axis=1)
    b = G @ np.asarray(W_f0).ravel()
    R1 = G @ np.asarray(W_r1).T
    F1 = np.sum(R1 * R1, axis=1)
    a = G @ np.asarray(W_x1).ravel()

    order = np.argsort(a, kind="stable")
    a_s, F1_s = a[order], F1[order]
    pre = np.minimum.accumulate(F1_s - mu * a_s)  # pairs with a <= b
    suf = np.minimum.accumulate((F1_s + mu * a_s)[::-1])[::-1]  # pairs with a >= b
    idx = np.searchsorted(a_s, b, side="right")
    best = np.full(b.shape, np.inf)
    has_lo = idx > 0
    best[has_lo] = pre[idx[has_lo] - 1] + mu * b[has_lo]
    has_hi = idx < a_s.size
    best[has_hi] = np.minimum(best[has_hi], suf[idx[has_hi]] - mu * b[has_hi])
    return float(np.min(F0 + best))


def softmax_reference(costs, lam):
    """Straight-line softmax of ``-costs / lam`` using ``math`` only."""
    import math

    c = [float(v) for v in costs]
    lo = min(c)
    e = [math.exp(-(v - lo) / lam) for v in c]
    s = math.fsum(e)
    return np.array([v / s for v in e])


def mlp_reference(weights, biases, z, shift=None, scale=None):
    """Plain-Python loop evaluation of a ReLU network."""
    h = [float(v) for v in z]
    if shift is not None:
        h = [v - s for v, s in zip(h, shift)]
    if scale is not None:
        h = [v / s for v, s in zip(h, scale)]
    for li, (W, b) in enumerate(zip(weights, biases)):
        out = []
        for r in range(len(b)):
            acc = float(b[r])
            for c in range(len(h)):
                acc += float(W[r][c]) * h[c]
            out.append(acc)
        if li < len(weights) - 1:
            out = [max(v, 0.0) for v in out]
        h = out
    return np.array(h)

"""Per-knot sample generation around the current iterate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DimensionError, TrustRegionError

Scheme = Literal["coordinate", "gaussian", "uniform"]


@dataclass(frozen=True)
class TrustRegion:
    """Per-coordinate sampling half-widths for states and controls."""

    delta_x: np.ndarray
    delta_u: np.ndarray

    def __post_init__(self):
        dx = np.atleast_1d(np.asarray(self.delta_x, dtype=float)).copy()
        du = np.atleast_1d(np.asarray(self.delta_u, dtype=float)).copy()
        if dx.ndim != 1 or du.ndim != 1:
            raise DimensionError("trust region rank", 1, (dx.ndim, du.ndim))
        for name, d in (("delta_x", dx), ("delta_u", du)):
            if d.size and not (np.all(np.isfinite(d)) and np.all(d > 0)):
                raise TrustRegionError(f"{name} entries must be finite and > 0, got {d.tolist()}")
        dx.setflags(write=False)
        du.setflags(write=False)
        object.__setattr__(self, "delta_x", dx)
        object.__setattr__(self, "delta_u", du)

    def scaled(self, factor: float) -> "TrustRegion":
        return TrustRegion(self.delta_x * factor, self.delta_u * factor)


@dataclass(frozen=True)
class SamplerConfig:
    scheme: Scheme = "coordinate"
    m_override: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("coordinate", "gaussian", "uniform"):
            raise ValueError(f"unknown sampling scheme {self.scheme!r}")
        if self.m_override is not None and self.m_override < 2:
            raise ValueError(f"m_override must be >= 2, got {self.m_override}")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")


def knot_rng(seed: int, iteration: int, knot: int) -> np.random.Generator:
    """Independent stream per (seed, iteration, knot); order of use is irrelevant."""
    return np.random.default_rng(np.random.SeedSequence([seed, iteration, knot]))


def _perturb(z: np.ndarray, dz: np.ndarray, cfg: SamplerConfig, rng: np.random.Generator | None) -> np.ndarray:
    """Rows are samples of the stacked variable; the last row is ``z`` itself."""
    n = z.size
    if cfg.scheme == "coordinate":
        eye = np.eye(n) * dz
        return np.vstack([z + eye, z - eye, z[None, :]])
    m = cfg.m_override if cfg.m_override is not None else 2 * n + 1
    if rng is None:
        rng = knot_rng(cfg.rng_seed, 0, 0)
    if cfg.scheme == "gaussian":
        xi = np.clip(0.5 * rng.standard_normal((m - 1, n)), -1.0, 1.0)
    else:
        xi = rng.uniform(-1.0, 1.0, (m - 1, n))
    return np.vstack([z + xi * dz, z[None, :]])


def sample_knot(
    iterate_x,
    iterate_u,
    tr: TrustRegion,
    cfg: SamplerConfig,
    *,
    pin_state: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Samples ``(X, U)`` with shapes ``(m, n_x)`` and ``(m, n_u)``.

    With ``pin_state`` only the controls are perturbed and every state sample
    equals ``iterate_x``.
    """
    x = np.atleast_1d(np.asarray(iterate_x, dtype=float))
    u = np.atleast_1d(np.asarray(iterate_u, dtype=float))
    if x.shape != tr.delta_x.shape:
        raise DimensionError("state vs trust region", tr.delta_x.shape, x.shape)
    if u.shape != tr.delta_u.shape:
        raise DimensionError("control vs trust region", tr.delta_u.shape, u.shape)
    if pin_state:
        U = _perturb(u, tr.delta_u, cfg, rng)
        return np.tile(x, (U.shape[0], 1)), U
    Z = _perturb(np.concatenate([x, u]), np.concatenate([tr.delta_x, tr.delta_u]), cfg, rng)
    return Z[:, : x.size], Z[:, x.size :]


def sample_terminal_knot(
    iterate_x,
    tr: TrustRegion,
    cfg: SamplerConfig,
    *,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """State-only samples ``(m, n_x)`` for the final knot."""
    x = np.atleast_1d(np.asarray(iterate_x, dtype=float))
    if x.shape != tr.delta_x.shape:
        raise DimensionError("state vs trust region", tr.delta_x.shape, x.shape)
    return _perturb(x, tr.delta_x, cfg, rng)

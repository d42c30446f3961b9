"""Versioned, strict run configuration for the command-line front end.

Example::

    {
      "schema_version": 1,
      "problem": {"id": "double_integrator", "overrides": {"N": 40}},
      "mode": "tbm",
      "tbm": {"tol_violation": 1e-4, "max_iterations": 60},
      "output_dir": "out/di",
      "seed": 0
    }

Unknown keys are rejected at every level. Unset solver fields fall back to the
problem's recommended settings and then to the library defaults.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .mppi import MppiConfig
from .problems import REGISTRY, build_problem
from .problems.base import ProblemDefinition
from .sampling import SamplerConfig, TrustRegion
from .scp import TbmConfig, default_config

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProblemSection(_Strict):
    id: str
    overrides: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _known(self):
        if self.id not in REGISTRY:
            raise ValueError(f"unknown problem {self.id!r} (known: {sorted(REGISTRY)})")
        return self


class TrustRegionSection(_Strict):
    delta_x: list[float]
    delta_u: list[float]


class SamplerSection(_Strict):
    scheme: Literal["coordinate", "gaussian", "uniform"] = "coordinate"
    m_override: Optional[int] = Field(default=None, ge=2)


class TbmSection(_Strict):
    mu: Optional[float] = Field(default=None, gt=0)
    tol_violation: Optional[float] = Field(default=None, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    tr_shrink_factor: Optional[float] = Field(default=None, gt=0, le=1)
    tr_shrink_on_increase: Optional[bool] = None
    tr_shrink_on_mismatch: Optional[bool] = None
    mismatch_ratio: Optional[float] = Field(default=None, gt=0, lt=1)
    tr_min_scale: Optional[float] = Field(default=None, ge=0, le=1)
    trust_region: Optional[TrustRegionSection] = None
    sampler: SamplerSection = Field(default_factory=SamplerSection)
    qp_tol: Optional[float] = Field(default=None, gt=0)
    qp_max_iter: Optional[int] = Field(default=None, ge=1)
    qp_backend: Optional[Literal["ipm", "admm"]] = None


class MppiSection(_Strict):
    lam: float = Field(default=1.0, ge=0)
    m_samples: int = Field(default=64, ge=1)
    noise_sigma: list[float] | float = 1.0
    horizon: Optional[int] = Field(default=None, ge=1)
    shift_fill: Literal["repeat_last", "zero"] = "repeat_last"
    iterations: int = Field(default=20, ge=1)  # mode "mppi": updates of the full-horizon plan
    steps: int = Field(default=50, ge=1)  # mode "mpc": closed-loop steps

    @model_validator(mode="after")
    def _positive_sigma(self):
        if not np.all(np.asarray(self.noise_sigma, dtype=float) > 0):
            raise ValueError("noise_sigma entries must be > 0")
        return self


class RunConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    problem: ProblemSection
    mode: Literal["tbm", "mppi", "mpc"] = "tbm"
    tbm: Optional[TbmSection] = None
    mppi: Optional[MppiSection] = None
    output_dir: str = "out"
    seed: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _one_mode(self):
        if self.mode == "tbm" and self.mppi is not None:
            raise ValueError("mode 'tbm' does not take an 'mppi' section")
        if self.mode in ("mppi", "mpc") and self.tbm is not None:
            raise ValueError(f"mode {self.mode!r} does not take a 'tbm' section")
        return self

    # -- construction of library objects ------------------------------------
    def build_problem(self) -> ProblemDefinition:
        return build_problem(self.problem.id, self.problem.overrides)

    def tbm_config(self, problem: ProblemDefinition, workers: int = 1, log_path: str | None = None) -> TbmConfig:
        sec = self.tbm or TbmSection()
        kw = {k: v for k, v in sec.model_dump(exclude={"trust_region", "sampler"}).items() if v is not None}
        if sec.trust_region is not None:
            kw["trust_region"] = TrustRegion(np.array(sec.trust_region.delta_x), np.array(sec.trust_region.delta_u))
            if kw["trust_region"].delta_x.size != problem.n_x or kw["trust_region"].delta_u.size != problem.n_u:
                raise ConfigError(
                    f"tbm.trust_region: expected {problem.n_x} state and {problem.n_u} control half-widths"
                )
        kw["sampler"] = SamplerConfig(sec.sampler.scheme, sec.sampler.m_override, self.seed)
        return default_config(problem, workers=workers, log_path=log_path, **kw)

    def mppi_config(self, problem: ProblemDefinition, workers: int = 1) -> MppiConfig:
        sec = self.mppi or MppiSection()
        return MppiConfig(
            lam=sec.lam,
            m_samples=sec.m_samples,
            noise_sigma=np.asarray(sec.noise_sigma, dtype=float),
            horizon=sec.horizon or problem.N - 1,
            rng_seed=self.seed,
            shift_fill=sec.shift_fill,
            workers=workers,
        )


def format_validation_error(err: ValidationError) -> str:
    """One line per problem, each prefixed with its dotted field path."""
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{path}: {e['msg']}")
    return "\n".join(lines)


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)

"""Problem library and a name-based registry for configuration files."""

from __future__ import annotations

from dataclasses import fields, replace
from typing import Callable

from ..errors import ConfigError
from .base import ProblemDefinition, linear_guess, rk4_step
from .cartpole import CartpoleConfig, CartpoleParams, cartpole, upright_error, wrap_angle
from .double_integrator import DoubleIntegratorConfig, double_integrator_obstacles
from .integrator import scalar_integrator
from .mlp import MlpWeights, identity_weights, load_weights, mlp_forward, save_weights
from .pendulum import PendulumConfig, pendulum
from .quadrotor import QuadrotorConfig, quadrotor_figure8


def _tuples(d: dict) -> dict:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}


def _dataclass_from(cls, overrides: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(overrides) - names)
    if unknown:
        raise ConfigError(f"{where}.{unknown[0]}: unknown override (allowed: {sorted(names)})")
    try:
        return cls(**_tuples(overrides))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _build_double_integrator(o: dict) -> ProblemDefinition:
    o = dict(o)
    if "obstacles" in o:
        o["obstacles"] = tuple(tuple(ob) for ob in o["obstacles"])
    return double_integrator_obstacles(_dataclass_from(DoubleIntegratorConfig, o, "problem.overrides"))


def _build_cartpole(o: dict) -> ProblemDefinition:
    o = dict(o)
    analytic = o.pop("analytic", True)
    weights_path = o.pop("weights_path", None)
    params = o.pop("params", None)
    cfg = _dataclass_from(CartpoleConfig, o, "problem.overrides")
    if params is not None:
        cfg = replace(cfg, params=_dataclass_from(CartpoleParams, params, "problem.overrides.params"))
    if not analytic and weights_path is None:
        raise ConfigError("problem.overrides.weights_path: required when analytic is false")
    return cartpole(analytic=analytic, weights_path=weights_path, cfg=cfg)


def _build_pendulum(o: dict) -> ProblemDefinition:
    return pendulum(_dataclass_from(PendulumConfig, o, "problem.overrides"))


def _build_quadrotor(o: dict) -> ProblemDefinition:
    return quadrotor_figure8(_dataclass_from(QuadrotorConfig, o, "problem.overrides"))


def _build_scalar(o: dict) -> ProblemDefinition:
    allowed = {"N", "x_init", "w_state", "w_control", "u_max"}
    unknown = sorted(set(o) - allowed)
    if unknown:
        raise ConfigError(f"problem.overrides.{unknown[0]}: unknown override (allowed: {sorted(allowed)})")
    return scalar_integrator(**o)


REGISTRY: dict[str, tuple[Callable[[dict], ProblemDefinition], str]] = {
    "double_integrator": (_build_double_integrator, "planar double integrator around three disks"),
    "cartpole": (_build_cartpole, "cartpole swing-up, analytic RK4 or loaded MLP dynamics"),
    "pendulum": (_build_pendulum, "torque-limited pendulum swing-up"),
    "quadrotor_figure8": (_build_quadrotor, "quadrotor tracking a skewed figure-eight (optional)"),
    "scalar_integrator": (_build_scalar, "scalar integrator regulation"),
}


def build_problem(problem_id: str, overrides: dict | None = None) -> ProblemDefinition:
    if problem_id not in REGISTRY:
        raise ConfigError(f"problem.id: unknown problem {problem_id!r} (known: {sorted(REGISTRY)})")
    return REGISTRY[problem_id][0](dict(overrides or {}))


__all__ = [
    "CartpoleConfig",
    "CartpoleParams",
    "DoubleIntegratorConfig",
    "MlpWeights",
    "PendulumConfig",
    "ProblemDefinition",
    "QuadrotorConfig",
    "REGISTRY",
    "build_problem",
    "cartpole",
    "double_integrator_obstacles",
    "identity_weights",
    "linear_guess",
    "load_weights",
    "mlp_forward",
    "pendulum",
    "quadrotor_figure8",
    "rk4_step",
    "save_weights",
    "scalar_integrator",
    "upright_error",
    "wrap_angle",
]

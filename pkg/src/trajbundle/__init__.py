"""Derivative-free trajectory optimization with sample bundles.

Each knot of the trajectory is represented by a small set of sampled
state/control points and the problem's function values at those points. A
convex QP over simplex weights picks the next iterate inside the convex hull of
the samples. The same weight solve, regularized by entropy, gives the
softmax-averaging sampling controller in :mod:`trajbundle.mppi`.
"""

from .bundle import KnotBundle, SimplexWeights, Trajectory, assemble_bundle, interpolate, project_simplex
from .errors import (
    ConfigError,
    DimensionError,
    EvaluatorError,
    StructureError,
    TrajBundleError,
    TrustRegionError,
    WeightsFileError,
)
from .mppi import ControlPolicy, MppiConfig, mpc_run, mppi_update, rollout
from .problems import ProblemDefinition, build_problem
from .sampling import SamplerConfig, TrustRegion, sample_knot, sample_terminal_knot
from .scp import SolveReport, TbmConfig, default_config, tbm_solve, violation
from .subproblem import solve, solve_entropy_regularized, transcribe

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ControlPolicy",
    "DimensionError",
    "EvaluatorError",
    "KnotBundle",
    "MppiConfig",
    "ProblemDefinition",
    "SamplerConfig",
    "SimplexWeights",
    "SolveReport",
    "StructureError",
    "TbmConfig",
    "TrajBundleError",
    "Trajectory",
    "TrustRegion",
    "TrustRegionError",
    "WeightsFileError",
    "assemble_bundle",
    "build_problem",
    "default_config",
    "interpolate",
    "mpc_run",
    "mppi_update",
    "project_simplex",
    "rollout",
    "sample_knot",
    "sample_terminal_knot",
    "solve",
    "solve_entropy_regularized",
    "tbm_solve",
    "transcribe",
    "violation",
]

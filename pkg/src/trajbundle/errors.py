"""Exception types raised across the package."""

from __future__ import annotations


class TrajBundleError(Exception):
    """Base class for all package errors."""


class DimensionError(TrajBundleError, ValueError):
    """Array shapes that should agree do not."""

    def __init__(self, what: str, expected, got):
        self.what = what
        self.expected = expected
        self.got = got
        super().__init__(f"{what}: expected {expected}, got {got}")


class EvaluatorError(TrajBundleError):
    """A problem evaluator produced a non-finite value or raised."""

    def __init__(self, evaluator: str, knot: int, sample: int | None = None, detail: str = ""):
        self.evaluator = evaluator
        self.knot = knot
        self.sample = sample
        where = f"knot {knot}" if sample is None else f"knot {knot}, sample {sample}"
        msg = f"{evaluator} evaluator failed at {where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class StructureError(TrajBundleError, ValueError):
    """Bundle layout violates a structural requirement of the transcription."""


class TrustRegionError(TrajBundleError, ValueError):
    """Non-positive trust-region half-width."""


class WeightsFileError(TrajBundleError, ValueError):
    """Malformed MLP weights file."""


class ConfigError(TrajBundleError, ValueError):
    """Run configuration failed validation."""

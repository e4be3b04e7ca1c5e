"""Exception hierarchy with module-qualified error codes.

Every error raised by netsis derives from NetsisError. The ``code`` attribute
(``"<module>.<ErrorName>"``) and the ``details`` dict are what the experiment
runner writes into the ``errors`` list of a report.
"""

from __future__ import annotations

from typing import Any


class NetsisError(Exception):
    """Base class for all netsis errors."""

    module = "netsis"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form used in reports."""
        return {"code": self.code, "message": self.message, "details": _jsonable(self.details)}


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


# ---- graphio ----


class GraphError(NetsisError):
    module = "graphio"


class EmptyGraph(GraphError):
    pass


class NegativeWeight(GraphError):
    pass


class MalformedLine(GraphError):
    pass


class ZeroInDegree(GraphError):
    pass


# ---- model ----


class ModelError(NetsisError):
    module = "model"


class NotStronglyConnected(ModelError):
    pass


class AssumptionTwoViolated(ModelError):
    pass


class AssumptionThreeViolated(ModelError):
    pass


class StateOutOfRange(ModelError):
    pass


class InvalidInterval(ModelError):
    pass


# ---- spectral ----


class SpectralError(NetsisError):
    module = "spectral"


class NotIrreducible(SpectralError):
    pass


class MaxIterationsExceeded(SpectralError):
    """Power iteration hit max_iter; ``report`` holds the best estimate."""

    def __init__(self, message: str, report: Any = None, **details: Any):
        super().__init__(message, **details)
        self.report = report


class NonPositiveVector(SpectralError):
    pass


# ---- equilibrium ----


class EquilibriumError(NetsisError):
    module = "equilibrium"


class RegimeMismatch(EquilibriumError):
    pass


class NoConvergence(EquilibriumError):
    """Fixed-point iteration hit max_iter; ``x`` holds the last iterate."""

    def __init__(self, message: str, x: Any = None, **details: Any):
        super().__init__(message, **details)
        self.x = x


class DegenerateDelta(EquilibriumError):
    pass


class BoundViolation(EquilibriumError):
    pass


# ---- stability ----


class StabilityError(NetsisError):
    module = "stability"


class NonNegativityViolation(StabilityError):
    pass


class SpectralCertificateFailed(StabilityError):
    pass


class NoPositiveState(StabilityError):
    pass


# ---- cli / experiments ----


class ExperimentError(NetsisError):
    module = "cli"


class ConfigError(ExperimentError):
    pass


class EmptyGrid(ExperimentError):
    pass


class MalformedTrajectory(ExperimentError):
    pass

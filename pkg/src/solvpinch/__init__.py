"""Ricci pinching of left-invariant metrics on solvable Lie groups."""

from ._kernels import BACKEND
from .errors import (
    DegenerateError,
    FlatMetricError,
    MalformedInputError,
    PreconditionError,
    RankAmbiguityWarning,
    SolvPinchError,
)
from .lie_core import DEFAULT_TOL, MetricLieAlgebra, pinching_F, ricci
from .almost_abelian import AAData, F_aa
from .soliton_search import BetaType, FlowConfig, FlowResult

__version__ = "0.1.0"

__all__ = [
    "AAData",
    "BACKEND",
    "BetaType",
    "DEFAULT_TOL",
    "DegenerateError",
    "F_aa",
    "FlatMetricError",
    "FlowConfig",
    "FlowResult",
    "MalformedInputError",
    "MetricLieAlgebra",
    "PreconditionError",
    "RankAmbiguityWarning",
    "SolvPinchError",
    "pinching_F",
    "ricci",
]

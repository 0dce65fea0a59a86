"""Expected utility with state-dependent linear utility functions."""

from .core import (
    PORA,
    LinearUtilityProfile,
    ProbabilityVector,
    ReturnVector,
    RiskAttitude,
    certainty_equivalent,
    classify_risk_attitude,
    expected_utility,
    expected_utility_telescoped,
    expected_value,
    more_risk_averse,
    risk_premium,
    tail_probability,
)
from .errors import DimensionMismatch, InvariantViolation, PreconditionError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "PORA",
    "DimensionMismatch",
    "InvariantViolation",
    "LinearUtilityProfile",
    "PreconditionError",
    "ProbabilityVector",
    "ReturnVector",
    "RiskAttitude",
    "ValidationError",
    "certainty_equivalent",
    "classify_risk_attitude",
    "expected_utility",
    "expected_utility_telescoped",
    "expected_value",
    "more_risk_averse",
    "risk_premium",
    "tail_probability",
]

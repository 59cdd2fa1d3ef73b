"""Approximately Einstein ACH metrics for homogeneous contact models.

Numerically constructs the normal-form ACH metric of a homogeneous almost
pseudohermitian model as truncated Laurent jets in the special defining
function, solves the Einstein recursion order by order, extracts the
obstruction tensors, and renormalizes volume to the log-term coefficient.
"""

from .backend import backend_name
from .errors import (
    AchvolError,
    BoundaryMismatch,
    IncompatibleJ,
    JacobiViolation,
    JetError,
    LeadingZero,
    ModelError,
    ModelValidationError,
    NonPositiveLeading,
    NonPositiveLevi,
    OddLeadingDegree,
    OutOfWindow,
    SingularStage,
    SingularSystem,
    WindowTooLarge,
)
from .ljet import INF_TRUNC, LaurentJet

__version__ = "0.1.0"

__all__ = [
    "AchvolError",
    "BoundaryMismatch",
    "IncompatibleJ",
    "INF_TRUNC",
    "JacobiViolation",
    "JetError",
    "LaurentJet",
    "LeadingZero",
    "ModelError",
    "ModelValidationError",
    "NonPositiveLeading",
    "NonPositiveLevi",
    "OddLeadingDegree",
    "OutOfWindow",
    "SingularStage",
    "SingularSystem",
    "WindowTooLarge",
    "backend_name",
    "__version__",
]

"""Exception hierarchy shared across the package."""


class AchvolError(Exception):
    """Base class for all package errors."""


class JetError(AchvolError):
    """Errors raised by truncated Laurent-series arithmetic."""


class LeadingZero(JetError):
    """Inversion of a jet that is identically zero to truncation."""


class OddLeadingDegree(JetError):
    """Square root of a jet whose leading degree is odd."""


class NonPositiveLeading(JetError):
    """Square root of a jet whose leading coefficient is not positive."""


class OutOfWindow(JetError):
    """A coefficient at or beyond the truncation order was requested."""


class ModelError(AchvolError):
    """Errors raised while building or transforming contact models."""


class ModelValidationError(ModelError):
    """A constructed model failed validation; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonPositiveLevi(ModelError):
    """The supplied Levi matrix is not Hermitian positive definite."""


class JacobiViolation(ModelValidationError):
    """The supplied bracket data do not form a Lie algebra."""


class IncompatibleJ(ModelError):
    """A frame change produced a non-positive Levi matrix."""


class SingularSystem(AchvolError):
    """The canonical-connection linear system is singular or inconsistent."""


class BoundaryMismatch(AchvolError):
    """Metric boundary data disagree with the model requirements."""


class SingularStage(AchvolError):
    """A probe matrix is singular at a stage that should be solvable."""


class WindowTooLarge(AchvolError):
    """A numeric-profile endpoint lies outside the trust region."""

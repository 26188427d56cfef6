"""Exception hierarchy.

Validation problems (bad parameters, bad config) derive from
:class:`ValidationError`; failures of the numerics themselves derive from
:class:`NumericError`. The CLI maps these to exit codes 1 and 2.
"""


class QbxError(Exception):
    pass


class ValidationError(QbxError, ValueError):
    pass


class NumericError(QbxError, ArithmeticError):
    pass


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class CapabilityError(ValidationError):
    """Request exceeds what the implementation supports (order caps, geometry kinds)."""


class PlacementError(ValidationError):
    """Expansion ball does not fit on the requested side of the boundary."""


class GeometryViolation(ValidationError):
    """A source node falls inside the expansion ball."""


class ConfigError(ValidationError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class EvaluationError(NumericError):
    """Integrand produced a non-finite value at a quadrature node."""

    def __init__(self, message, panel=None, node=None):
        super().__init__(message)
        self.panel = panel
        self.node = node


class ConvergenceFailure(NumericError):
    pass


class InsufficientDataError(NumericError):
    pass

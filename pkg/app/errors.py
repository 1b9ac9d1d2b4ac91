"""
Exception hierarchy for the R-matrix toolkit.

Mathematical check failures are never raised; they come back as reports.
Only violated preconditions and malformed input end up here.
"""


class YBDError(Exception):
    """Base class for all toolkit errors."""


class ScalarError(YBDError):
    """Invalid scalar value or scalar text."""


class DivisionByZero(ScalarError, ZeroDivisionError):
    """Inversion of a zero field element."""


class NotInvertible(ScalarError):
    """Inversion of a jet with vanishing constant term."""


class IncompatibleMonoids(ScalarError):
    """Multiplication of monomials with different a-exponent groups."""


class ShapeError(YBDError):
    """Operators of different dimension or arity were combined."""


class ParamError(YBDError):
    """Parameter set violates its invariants or an operation's precondition."""


class SpecError(YBDError):
    """Invalid deformation or esoteric specification."""


class Infeasible(YBDError):
    """Exponent-lattice constraint system has no solution."""


class ScaleError(YBDError):
    """Dimension too large for the exact first-order solver."""


class GaugeError(YBDError):
    """Input is not a first-order deformation that can be gauge fixed."""


class ConventionError(YBDError):
    """Converted R-matrix does not reduce to the identity at h = 0."""


class ConstraintError(YBDError):
    """Deformation constraints fail at order h."""


class FormatError(YBDError):
    """Malformed input file or document."""

    def __init__(self, message: str, path: str | None = None, pointer: str = ""):
        self.path = path
        self.pointer = pointer
        location = path or "<input>"
        if pointer:
            location = f"{location}:{pointer}"
        super().__init__(f"{location}: {message}")

class FWSensError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(FWSensError, ValueError):
    "Raised when vector or matrix shapes do not match the polytope."


class InfeasibleError(FWSensError):
    "Raised when the polytope {z : Az <= b} is empty."


class UnboundedError(FWSensError):
    "Raised when a linear objective is unbounded below (the polytope is not compact)."


class NumericalBreakdownError(FWSensError):
    "Raised when the simplex method cannot pivot safely or fails to terminate."


class InfeasiblePointError(FWSensError, ValueError):
    "Raised when a point that must lie in P does not."


class NotConvexError(FWSensError, ValueError):
    "Raised when a quadratic objective has an indefinite Hessian."


class SizeGuardError(FWSensError):
    "Raised when an instance exceeds the brute-force enumeration guards."


class ProblemFormatError(FWSensError, ValueError):
    """Raised when a problem file violates the schema.

    Attributes:
        field: dotted name of the offending field, e.g. ``objective.Q``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")

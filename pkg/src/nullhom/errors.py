"""Exception types raised across the package."""


class NullHomError(ValueError):
    """Base class for all errors raised by :mod:`nullhom`."""


class WindowTooShort(NullHomError):
    pass


class IndexOutOfWindow(NullHomError, IndexError):
    pass


class DimensionMismatch(NullHomError):
    pass


class NotStochastic(NullHomError):
    pass


class NotIrreducible(NullHomError):
    pass


class RequiresExactScalars(NullHomError):
    """Lattice analysis was asked for on real-valued or vector increments."""


class InvalidBounds(NullHomError):
    pass


class SolverFailure(NullHomError, ArithmeticError):
    pass


class MaxIterations(NullHomError, RuntimeError):
    pass


class FieldMismatch(NullHomError):
    """A corrector was checked against a field it was not built from."""


class InsufficientReps(NullHomError):
    pass

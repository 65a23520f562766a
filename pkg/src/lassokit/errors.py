"""Exception types raised across the package."""


class LassoError(Exception):
    """Base class for all errors raised by lassokit."""


class DimensionError(LassoError, ValueError):
    pass


class SymmetryError(LassoError, ValueError):
    pass


class ConvergenceError(LassoError, RuntimeError):
    pass


class SingularSupportError(LassoError, ArithmeticError):
    """Restricted Gram matrix X_S'X_S is (numerically) singular."""

    def __init__(self, support, message=None):
        self.support = tuple(int(j) for j in support)
        if message is None:
            message = "X_S'X_S is singular for support %s (1-based)" % (
                [j + 1 for j in self.support],)
        super().__init__(message)


class DivergenceError(LassoError, ArithmeticError):
    """A non-finite value appeared during iteration.

    ``trace`` holds whatever was recorded before the blow-up, so callers
    (the bound checker in particular) can still inspect it.
    """

    def __init__(self, iteration, algorithm="", trace=None):
        self.iteration = iteration
        self.algorithm = algorithm
        self.trace = trace
        who = "%s: " % algorithm if algorithm else ""
        super().__init__("%snon-finite value at iteration %d" % (who, iteration))


class LineSearchError(LassoError, RuntimeError):
    pass


class DegenerateProblemError(LassoError, ValueError):
    pass


class PathSingularityError(SingularSupportError):
    pass


class PathOverflowError(LassoError, RuntimeError):
    pass


class AmbiguityError(LassoError, ValueError):
    pass


class OracleUnstableError(LassoError, RuntimeError):
    pass


class BoundPairingError(LassoError, ValueError):
    pass


class DegenerateColumnError(DegenerateProblemError):
    """A design column has zero norm, so its coordinate update is undefined."""

    def __init__(self, column):
        self.column = int(column)
        super().__init__("column %d (1-based) of X has zero norm" % (self.column + 1))

"""Exception hierarchy shared by all modules."""


class HulthenDiracError(Exception):
    """Base class for every error raised by this package."""


# nu_engine
class DegreeViolation(HulthenDiracError, ValueError):
    pass


class NoSolution(HulthenDiracError):
    pass


class NotPerfectSquare(HulthenDiracError):
    pass


class AmbiguousBranch(HulthenDiracError):
    pass


class UnsupportedSigmaClass(HulthenDiracError, ValueError):
    pass


# special functions
class RecurrenceBreakdown(HulthenDiracError, ArithmeticError):
    pass


class PoleAtB(HulthenDiracError, ValueError):
    pass


class NonConvergence(HulthenDiracError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


# physics layer
class PoleAtX(HulthenDiracError, ZeroDivisionError):
    pass


class PoleAtS(HulthenDiracError, ZeroDivisionError):
    pass


class DegenerateShape(HulthenDiracError, ValueError):
    pass


class NotApplicable(HulthenDiracError, ValueError):
    pass


class EmptyWindow(HulthenDiracError):
    pass


# verification
class NoConvergence(HulthenDiracError):
    def __init__(self, message, trajectory=()):
        super().__init__(message)
        self.trajectory = list(trajectory)


class EigensolverFailure(HulthenDiracError):
    pass

"""Exception hierarchy.

Input errors map to CLI exit status 2, numerical failures to exit status 3.
"""


class KleinianError(Exception):
    """Base class for every error raised by this package."""


class InputError(KleinianError, ValueError):
    """A precondition on the caller's data does not hold."""


class NumericalFailure(KleinianError, ArithmeticError):
    """A floating-point procedure could not reach the requested accuracy."""


class BoundaryAmbiguity(NumericalFailure):
    """A root lies within tolerance of a line where a strict count was asked for."""


class NonConvergence(NumericalFailure):
    pass


class NumericalStall(NumericalFailure):
    pass


class SearchExhausted(NumericalFailure):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NearZeroOnLine(NumericalFailure):
    pass


class SignConventionUnresolved(NumericalFailure):
    pass


class NotRealOnLine(InputError):
    pass


class NotDefined(InputError):
    pass


class NotReal(InputError):
    pass


class DegenerateLeading(InputError):
    pass


class NotAPair(InputError):
    pass


class FactorizationMismatch(InputError):
    pass


class NotDivisible(InputError):
    pass


class NotNonnegative(InputError):
    pass


class NotHomogeneous(InputError):
    pass


class RootOnLine(InputError):
    pass


class HypothesisFails(InputError):
    pass


class PairingFailure(InputError):
    pass

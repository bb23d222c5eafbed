"""Exception hierarchy shared by every module of the package."""


class TetraInterpError(Exception):
    """Base class for all package errors."""


class DegreeExceedsN(TetraInterpError):
    pass


class ZeroPolynomial(TetraInterpError):
    pass


class InvalidData(TetraInterpError):
    """Interpolation data violate one of the admissibility clauses.

    The message names the violated clause.
    """


class NotHermitian(TetraInterpError):
    pass


class NotPositiveDefinite(TetraInterpError):
    """The Pick matrix failed the Cholesky test.

    Attributes
    ----------
    rank : int
        Numerical rank estimate of the Pick matrix.
    smallest_pivot : float
        Smallest Cholesky pivot reached before the failure.
    """

    def __init__(self, message, rank=None, smallest_pivot=None):
        super().__init__(message)
        self.rank = rank
        self.smallest_pivot = smallest_pivot


class TauSearchExhausted(TetraInterpError):
    pass


class ExceptionalParameter(TetraInterpError):
    pass


class PolePoint(TetraInterpError):
    pass


class RoyalPoint(TetraInterpError):
    pass


class NotInClosure(TetraInterpError):
    pass


class DegenerateOmega(TetraInterpError):
    pass


class NotUnimodularAt(TetraInterpError):
    pass


class ZeroAt(TetraInterpError):
    pass


class NotSolvable(TetraInterpError):
    """No center point was found at the searched resolution.

    Attributes
    ----------
    best_residual : float
        Smallest interpolation residual seen during the search.
    best_angle : float
        Angle of ``x3`` at which that residual was attained.
    """

    def __init__(self, message, best_residual=None, best_angle=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_angle = best_angle


class ExceptionalGeometry(TetraInterpError):
    pass


class DenominatorVanishes(TetraInterpError):
    pass


class RepresentationMismatch(TetraInterpError):
    pass


class RoyalVariety(TetraInterpError):
    pass


class NumericalDegeneracy(TetraInterpError):
    pass


class PoleOmega(TetraInterpError):
    pass

"""Exception hierarchy for chebpot."""


class ChebpotError(Exception):
    """Base class for all chebpot errors."""


class OverlapError(ChebpotError):
    """Input intervals intersect beyond tolerance."""


class DegenerateIntervalError(ChebpotError):
    """An input interval has zero or negative width."""


class NonFiniteEndpointError(ChebpotError):
    """An interval endpoint is not a finite real number."""


class PointOnSetError(ChebpotError):
    """A point that must lie off the set was found on it."""


class PoleOnSetError(PointOnSetError):
    """A Green-function pole or harmonic-measure base lies on the set."""


class ZeroOnSetError(PointOnSetError):
    """A weight zero/pole lies on the set where it is not allowed."""


class BothComplexError(ChebpotError):
    """Green cross-evaluation needs at least one real or infinite argument."""


class IllConditionedError(ChebpotError):
    """An internal linear system is singular beyond tolerance."""


class NoConvergenceError(ChebpotError):
    """Iterative solver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class WeightDegenerateError(ChebpotError):
    """Weight vanishes on every candidate node."""


class DifferentGapError(ChebpotError):
    """Renormalization point lies in a different gap than the solution's."""


class ZeroAtPointError(ChebpotError):
    """Polynomial vanishes at the requested renormalization point."""


class BelowN0Error(ChebpotError):
    """Degree is below the threshold n0 of the rational frame."""


class AmbiguousCancellationError(ChebpotError):
    """A numerator/denominator zero pair falls inside the ambiguity band."""


class BandCountMismatchError(ChebpotError):
    """Level-set root finding produced an inconsistent band count."""


class DescriptorError(ChebpotError):
    """A problem descriptor failed validation; carries a JSON-pointer path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path

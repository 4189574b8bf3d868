"""Exception types raised across the package."""


class MarkovTypeError(Exception):
    pass


class MetricViolation(MarkovTypeError, ValueError):
    """A distance matrix fails a metric axiom.

    ``kind`` is one of ``shape``, ``diagonal``, ``symmetry``, ``negative``,
    ``coincident-points`` or ``triangle``; ``indices`` holds the offending
    pair or triple.
    """

    def __init__(self, kind, indices=(), message=None):
        self.kind = kind
        self.indices = tuple(indices)
        super().__init__(message or f"{kind} violation at {self.indices}")


class InvalidExponent(MarkovTypeError, ValueError):
    pass


class InvalidScale(MarkovTypeError, ValueError):
    pass


class NotIsometries(MarkovTypeError, ValueError):
    pass


class NotAGroup(MarkovTypeError, ValueError):
    pass


class Disconnected(MarkovTypeError, ValueError):
    pass


class NotSurjective(MarkovTypeError, ValueError):
    pass


class NotStochastic(MarkovTypeError, ValueError):
    def __init__(self, kind, index=None):
        self.kind = kind
        self.index = index
        where = "" if index is None else f" at {index}"
        super().__init__(f"{kind} is not stochastic{where}")


class NotReversible(MarkovTypeError, ValueError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"detailed balance fails for states ({i}, {j})")


class IndexOutOfRange(MarkovTypeError, IndexError):
    pass


class ZeroMassState(MarkovTypeError, ValueError):
    pass


class DegenerateWalk(MarkovTypeError, ValueError):
    """The walk never moves: E_p(W, 1) = 0."""


class AsymmetricE(MarkovTypeError, ValueError):
    pass


class NotRegular(MarkovTypeError, ValueError):
    pass


class SpaceMismatch(MarkovTypeError, ValueError):
    pass


class NotCovering(MarkovTypeError, ValueError):
    pass


class HypothesisViolated(MarkovTypeError, ValueError):
    def __init__(self, which, message=None):
        self.which = which
        super().__init__(message or f"hypothesis violated: {which}")


class LengthMismatch(MarkovTypeError, ValueError):
    pass


class TooLarge(MarkovTypeError, ValueError):
    pass


class ResolutionTooLarge(MarkovTypeError, ValueError):
    pass


class IsolatedState(MarkovTypeError, ValueError):
    pass


class TooManyParameters(MarkovTypeError, ValueError):
    pass


class OutOfRange(MarkovTypeError, ValueError):
    pass

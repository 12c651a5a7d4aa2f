"""Exception and warning types shared across the package."""

from __future__ import annotations


class RabiPtError(Exception):
    """Base class for all structured errors raised by this package."""


class ResonantParameterError(RabiPtError, ValueError):
    """A three-term recurrence division hit a vanishing factor.

    Raised when 2*sigma*epsilon + (n - k)*omega = 0 for a step k the
    recurrence actually has to perform (half-integer epsilon/omega ratios).
    """


class RootCollisionError(RabiPtError, ValueError):
    """Bethe roots coincide pairwise or sit on a pole of the residual."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = indices


class MapSingularityError(RabiPtError, ValueError):
    """The Moebius map u -> z sends a root to infinity (u = 1)."""


class SingularPointError(RabiPtError, ValueError):
    """Evaluation requested at the x = 0 singular point."""


class EvaluationRangeError(RabiPtError, ValueError):
    """Direct evaluation would overflow/underflow double precision."""


class TruncationError(RabiPtError, RuntimeError):
    """Fock-space truncation doubling failed to converge.

    Carries the last two level arrays for diagnosis.
    """

    def __init__(self, message: str, previous=None, current=None):
        super().__init__(message)
        self.previous = previous
        self.current = current


class ConvergenceError(RabiPtError, RuntimeError):
    """An iterative solver stalled; carries the best iterate found."""

    def __init__(self, message: str, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class MeshError(RabiPtError, RuntimeError):
    """Finite-difference mesh too coarse: Richardson pair disagrees."""


class DegenerateAtomicLimitWarning(UserWarning):
    """Delta = 0: the exceptional family degenerates (every coupling).

    The constraint polynomial has no isolated role here; callers receive an
    empty point list plus this warning.
    """

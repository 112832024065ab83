"""Exception types shared across the toolkit."""


class QFracError(Exception):
    """Base class for all toolkit errors."""


class DomainError(QFracError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(QFracError, OverflowError):
    """A requested grid or value exceeds the representable floating range."""


class BoundaryError(QFracError, IndexError):
    """An operation needs grid points that do not exist (e.g. a predecessor)."""


class GridMismatchError(QFracError, ValueError):
    """Two grid-sampled objects do not live on the same grid."""


class PoleError(QFracError, ZeroDivisionError):
    """Evaluation hit a pole of the target function."""


class DivergenceError(QFracError):
    """A series shows sustained growth instead of converging."""

    def __init__(self, message: str, ratio: float | None = None):
        super().__init__(message)
        self.ratio = ratio


class NonConvergenceError(QFracError):
    """An iteration exhausted its budget without meeting tolerance."""

    def __init__(self, message: str, last_delta: float | None = None):
        super().__init__(message)
        self.last_delta = last_delta


class StepError(NonConvergenceError):
    """A grid-marching step failed; carries the offending grid index."""

    def __init__(self, message: str, index: int, last_delta: float | None = None):
        super().__init__(message, last_delta)
        self.index = index


class PreconditionError(QFracError):
    """A hypothesis or solvability precondition fails; carries the offending indices."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = tuple(indices)


class InputFormatError(QFracError, ValueError):
    """Structured input (CSV rows, config files) could not be parsed or validated."""

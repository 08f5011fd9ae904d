"""Exception hierarchy for bound computation, construction and verification."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.hashbounds.models import MtStats


class HashBoundsError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(HashBoundsError, ValueError):
    """A precondition on (n, m, w, parts, N, ...) is violated."""


class AlphabetTooSmallError(InvalidParameterError):
    """w > m: no row can be injective, so D_m(w) vanishes."""


class DegenerateClusterError(HashBoundsError):
    """The cluster polynomial has degree 1 (n < 2w); the maximum is not attained."""


class DegenerateProbabilityError(HashBoundsError):
    """The per-row failure probability q is 0 or 1."""


class ExactDivisionError(HashBoundsError):
    """An expression that must be an integer left a remainder."""


class InstanceTooLargeError(HashBoundsError):
    """A brute-force or exhaustive path was asked to enumerate too much."""


class ResampleLimitError(HashBoundsError):
    """The Moser-Tardos loop hit its resample cap.

    Not a proof of non-existence: the row count is probably below threshold.
    """

    def __init__(self, message: str, stats: MtStats) -> None:
        super().__init__(message)
        self.stats = stats


class MatrixFormatError(HashBoundsError):
    """A matrix file does not follow the documented text format."""

    def __init__(self, message: str, line: int, column: int | None = None) -> None:
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column

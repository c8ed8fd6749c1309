"""Exception types shared across the package.

Input problems derive from :class:`InvalidInput` (a ``ValueError``), which the
CLI maps to exit code 2. :class:`PrecisionExhausted` maps to exit code 3 and
:class:`PositivityViolated` to exit code 1.
"""

from __future__ import annotations


class ExpBoundsError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ExpBoundsError, ValueError):
    """Base class for rejected arguments."""

    def details(self) -> dict:
        return {}


class Empty(InvalidInput):
    def __init__(self) -> None:
        super().__init__("node list is empty")


class NonFinite(InvalidInput):
    def __init__(self, index: int) -> None:
        self.index = index
        super().__init__(f"node {index} is not finite")

    def details(self) -> dict:
        return {"index": self.index}


class NotStrictlyIncreasing(InvalidInput):
    def __init__(self, index: int) -> None:
        self.index = index
        super().__init__(f"node {index} is not larger than node {index - 1}")

    def details(self) -> dict:
        return {"index": self.index}


class DimensionMismatch(InvalidInput):
    pass


class NTooLarge(InvalidInput):
    pass


class InvalidUSum(InvalidInput):
    pass


class TooManyDims(InvalidInput):
    pass


class InvalidOrder(InvalidInput):
    pass


class DegenerateNodes(InvalidInput):
    pass


class InvalidLambda(InvalidInput):
    pass


class PrecisionExhausted(ExpBoundsError):
    """Results kept disagreeing as the working precision was raised.

    ``previous`` and ``last`` hold the final two values that failed to agree.
    """

    def __init__(self, message: str, previous=None, last=None, bits: int | None = None) -> None:
        super().__init__(message)
        self.previous = previous
        self.last = last
        self.bits = bits


class PositivityViolated(ExpBoundsError):
    """A determinant that must be positive came out non-positive."""

    def __init__(self, message: str, witness=None) -> None:
        super().__init__(message)
        self.witness = witness

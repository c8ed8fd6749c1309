"""Validated node vectors and the scalar quantities built from them.

All products (Vandermonde, superfactorial) are returned as natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import Empty, NonFinite, NotStrictlyIncreasing


@dataclass(frozen=True)
class NodeVector:
    """A nonempty, finite, strictly increasing tuple of floats.

    Build one with :func:`validate_nodes`; the constructor does not check.
    """

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def tolist(self) -> list[float]:
        return list(self.values)


def validate_nodes(raw: Iterable[float] | NodeVector) -> NodeVector:
    if isinstance(raw, NodeVector):
        return raw
    values = tuple(float(v) for v in raw)
    if not values:
        raise Empty()
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise NonFinite(i)
    for i in range(1, len(values)):
        if not values[i - 1] < values[i]:
            raise NotStrictlyIncreasing(i)
    return NodeVector(values)


def sorted_nodes(raw: Iterable[float] | NodeVector) -> NodeVector:
    """Sort distinct nodes before validating; ties are still rejected."""
    if isinstance(raw, NodeVector):
        return raw
    values = [float(v) for v in raw]
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise NonFinite(i)
    return validate_nodes(sorted(values))


def log_vandermonde(nodes: NodeVector) -> float:
    """ln of prod_{i<j} (x_j - x_i); 0 for a single node."""
    x = nodes.values
    n = len(x)
    return math.fsum(math.log(x[j] - x[i]) for i in range(n) for j in range(i + 1, n))


def log_superfactorial(n: int) -> float:
    """ln(1! * 2! * ... * (n-1)!)."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.fsum(math.lgamma(i + 1) for i in range(1, n))


def node_sum(nodes: NodeVector | Sequence[float]) -> float:
    # fsum is correctly rounded, so this is the exact sum rounded once
    return math.fsum(nodes)


def centered_moments(nodes: NodeVector | Sequence[float]) -> tuple[float, float]:
    """Return ``(mean, S)`` with ``S = sum (v_i - mean)**2`` (two-pass)."""
    values = list(nodes)
    mean = math.fsum(values) / len(values)
    S = math.fsum((v - mean) ** 2 for v in values)
    return mean, S

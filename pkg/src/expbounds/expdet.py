"""The exponential matrix ``A = [exp(x_i * y_j)]`` and its determinant bounds."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, NTooLarge, PositivityViolated
from .highprec import LogNumber, PrecisionConfig, context, escalate, lu_logdet
from .nodes import NodeVector, log_superfactorial, log_vandermonde, node_sum, validate_nodes


@dataclass(frozen=True)
class ExpMatrixSpec:
    x: NodeVector
    y: NodeVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", validate_nodes(self.x))
        object.__setattr__(self, "y", validate_nodes(self.y))
        if len(self.x) != len(self.y):
            raise DimensionMismatch(f"x has {len(self.x)} nodes but y has {len(self.y)}")

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class LogBounds:
    log_lower: float
    log_upper: float

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.log_lower - slack <= value <= self.log_upper + slack


@dataclass(frozen=True)
class TotalPositivityReport:
    min_log_minor: float
    witness: tuple[tuple[int, ...], tuple[int, ...]]
    n_minors: int


def build_matrix(spec: ExpMatrixSpec, cfg: PrecisionConfig | int) -> list[list]:
    bits = cfg if isinstance(cfg, int) else cfg.mantissa_bits
    ctx = context(bits)
    xs = [ctx.mpf(v) for v in spec.x]
    ys = [ctx.mpf(v) for v in spec.y]
    return [[ctx.exp(xi * yj) for yj in ys] for xi in xs]


def logdet_exp(spec: ExpMatrixSpec, cfg: PrecisionConfig | None = None) -> LogNumber:
    """ln det(A) from the escalating high-precision oracle (float ``log_abs``)."""
    value, _ = logdet_exp_with_tol(spec, cfg)
    return value


def logdet_exp_with_tol(spec: ExpMatrixSpec, cfg: PrecisionConfig | None = None) -> tuple[LogNumber, float]:
    cfg = cfg or PrecisionConfig()
    value, tol = escalate(lambda bits: lu_logdet(build_matrix(spec, bits), bits), cfg)
    if value.sign != 1:
        raise PositivityViolated(f"det(A) came out with sign {value.sign}", witness=spec)
    return value.to_float(), tol


def _log_prefactor(spec: ExpMatrixSpec) -> float:
    return log_vandermonde(spec.x) + log_vandermonde(spec.y) - log_superfactorial(spec.n)


def theorem_bounds(spec: ExpMatrixSpec) -> LogBounds:
    base = _log_prefactor(spec)
    n = spec.n
    lower = base + node_sum(spec.x) * node_sum(spec.y) / n
    upper = base + hadamard_log_upper(spec)
    return LogBounds(lower, upper)


def hadamard_log_upper(spec: ExpMatrixSpec) -> float:
    return math.fsum(a * b for a, b in zip(spec.x, spec.y))


def _submatrix(m: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]) -> list[list]:
    return [[m[i][j] for j in cols] for i in rows]


def total_positivity_check(
    spec: ExpMatrixSpec, cfg: PrecisionConfig | None = None, max_n: int = 6
) -> TotalPositivityReport:
    """Check every minor of A is positive; return the smallest log-minor.

    There are sum_k C(n, k)**2 minors, hence the ``max_n`` guard.
    """
    cfg = cfg or PrecisionConfig()
    n = spec.n
    if n > max_n:
        raise NTooLarge(f"n = {n} exceeds max_n = {max_n}")

    cache: dict[int, list[list]] = {}

    def full(bits: int) -> list[list]:
        if bits not in cache:
            cache[bits] = build_matrix(spec, bits)
        return cache[bits]

    best = math.inf
    witness: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())
    count = 0
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                count += 1
                value, _ = escalate(lambda bits: lu_logdet(_submatrix(full(bits), rows, cols), bits), cfg)
                if value.sign != 1:
                    raise PositivityViolated(f"minor rows={rows} cols={cols} has sign {value.sign}", witness=(rows, cols))
                v = float(value.log_abs)
                if v < best:
                    best, witness = v, (rows, cols)
    return TotalPositivityReport(best, witness, count)

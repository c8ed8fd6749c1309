"""Configurable-precision arithmetic and log-domain determinant kernels.

Every computation takes its precision as an argument and works in a private
:class:`mpmath.MPContext`, so nothing depends on the global ``mpmath.mp``
setting and concurrent callers do not interfere.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath

from .errors import DimensionMismatch, PrecisionExhausted


@dataclass(frozen=True)
class PrecisionConfig:
    mantissa_bits: int = 256
    max_escalations: int = 4
    agree_tol: float = 1e-20

    def __post_init__(self) -> None:
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be at least 64")
        if self.max_escalations < 1:
            raise ValueError("max_escalations must be at least 1")
        if not self.agree_tol > 0:
            raise ValueError("agree_tol must be positive")


@dataclass(frozen=True)
class LogNumber:
    """A real stored as a sign and the natural log of its magnitude.

    ``log_abs`` is a float or an mpf at the precision it was computed with,
    and is ``nan`` when ``sign == 0``.
    """

    sign: int
    log_abs: object

    @classmethod
    def zero(cls) -> "LogNumber":
        return cls(0, float("nan"))

    def to_float(self) -> "LogNumber":
        return LogNumber(self.sign, float(self.log_abs))


@functools.lru_cache(maxsize=32)
def context(bits: int) -> mpmath.MPContext:
    """A private mpmath context at ``bits`` of mantissa. Never mutate it."""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


Matrix = Sequence[Sequence[object]]


def _square(matrix: Matrix, ctx) -> list[list]:
    n = len(matrix)
    rows = []
    for row in matrix:
        if len(row) != n:
            raise DimensionMismatch(f"expected a square matrix, got a row of length {len(row)} in a {n}-row matrix")
        rows.append([ctx.convert(a) for a in row])
    return rows


def _lu_inplace(a: list[list], ctx) -> tuple[list[int], int, bool]:
    """Row-pivoted Gaussian elimination in place.

    Returns ``(perm, parity, singular)`` where ``perm[k]`` is the original
    row index now in position ``k``.
    """
    n = len(a)
    perm = list(range(n))
    parity = 1
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(a[r][k]))
        if a[p][k] == 0:
            return perm, parity, True
        if p != k:
            a[k], a[p] = a[p], a[k]
            perm[k], perm[p] = perm[p], perm[k]
            parity = -parity
        pivot = a[k][k]
        for i in range(k + 1, n):
            factor = a[i][k] / pivot
            if factor == 0:
                continue
            a[i][k] = factor
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] -= factor * row_k[j]
    return perm, parity, False


def lu_logdet(matrix: Matrix, bits: int) -> LogNumber:
    """Sign and ln|det| of a square matrix by pivoted LU at ``bits`` precision.

    ``log_abs`` of the result is an mpf at that precision.
    """
    ctx = context(bits)
    a = _square(matrix, ctx)
    if not a:
        return LogNumber(1, ctx.mpf(0))
    _, sign, singular = _lu_inplace(a, ctx)
    if singular:
        return LogNumber.zero()
    log_abs = ctx.mpf(0)
    for k in range(len(a)):
        d = a[k][k]
        if d < 0:
            sign = -sign
        log_abs += ctx.ln(abs(d))
    return LogNumber(sign, log_abs)


def lu_solve(matrix: Matrix, rhs: Sequence[Sequence[object]], bits: int) -> list[list]:
    """Solve ``matrix @ X = B`` for each column ``B`` in ``rhs``.

    ``rhs`` is a list of right-hand-side vectors; one solution vector (of
    mpf) is returned per entry.
    """
    ctx = context(bits)
    a = _square(matrix, ctx)
    n = len(a)
    perm, _, singular = _lu_inplace(a, ctx)
    if singular:
        raise ZeroDivisionError("matrix is singular at working precision")
    out = []
    for b in rhs:
        if len(b) != n:
            raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {n}")
        y = [ctx.convert(b[perm[i]]) for i in range(n)]
        for i in range(n):
            y[i] -= ctx.fsum(a[i][j] * y[j] for j in range(i))
        for i in reversed(range(n)):
            y[i] = (y[i] - ctx.fsum(a[i][j] * y[j] for j in range(i + 1, n))) / a[i][i]
        out.append(y)
    return out


def log_agreement(a: LogNumber, b: LogNumber) -> float:
    """Relative disagreement of two log-domain values (``inf`` on sign mismatch).

    Uses ``|a - b| / max(1, |b|)`` so values near ``log_abs = 0`` are
    compared absolutely.
    """
    if a.sign != b.sign:
        return float("inf")
    if a.sign == 0:
        return 0.0
    diff = abs(a.log_abs - b.log_abs)
    return float(diff / max(1, abs(b.log_abs)))


def escalate(compute: Callable[[int], LogNumber], cfg: PrecisionConfig) -> tuple[LogNumber, float]:
    """Evaluate ``compute(bits)`` at doubling precisions until two agree.

    Returns the higher-precision value of the first agreeing pair and the
    observed relative disagreement.
    """
    bits = cfg.mantissa_bits
    prev = compute(bits)
    for _ in range(cfg.max_escalations):
        bits *= 2
        cur = compute(bits)
        tol = log_agreement(prev, cur)
        if tol <= cfg.agree_tol:
            return cur, tol
        prev = cur
    raise PrecisionExhausted(
        f"no agreement to {cfg.agree_tol:g} up to {bits} bits", previous=prev, last=cur, bits=bits
    )

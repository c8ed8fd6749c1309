"""Divided differences of the exponential family and the mean-derivative error sandwich.

The function family is ``f(a) = exp(c*a) / c**m`` with analytic derivatives
``f^(k)(a) = c**(k-m) * exp(c*a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidUSum
from .highprec import PrecisionConfig, context
from .nodes import NodeVector, centered_moments, node_sum, sorted_nodes, validate_nodes

# Below this consecutive-node gap the double-precision Newton table is
# abandoned for the configurable-precision one.
TIGHT_GAP = 1e-3


@dataclass(frozen=True)
class SmoothExpFamily:
    c: float = 1.0
    m: int = 0

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.m > 0 and self.c == 0:
            raise ValueError("c must be nonzero when m > 0")

    def value(self, alpha, ctx=None):
        return self.derivative(0, alpha, ctx)

    def derivative(self, k: int, alpha, ctx=None):
        if ctx is None:
            return self.c ** (k - self.m) * math.exp(self.c * alpha)
        c = ctx.mpf(self.c)
        return c ** (k - self.m) * ctx.exp(c * ctx.mpf(alpha))


@dataclass(frozen=True)
class DividedDiffResult:
    """``table[j][i]`` is the order-``j`` quotient ``[v_i, ..., v_{i+j}]f``."""

    value: float
    table: list[list[float]]


@dataclass(frozen=True)
class ResidualBounds:
    residual: float
    lo: float
    hi: float

    def holds(self) -> bool:
        return self.lo <= self.residual <= self.hi


@dataclass(frozen=True)
class DDLowerBound:
    dd: float
    bound: float


def _newton_table(v, fv) -> list[list]:
    n = len(v)
    table = [list(fv)]
    for j in range(1, n):
        prev = table[-1]
        table.append([(prev[i + 1] - prev[i]) / (v[i + j] - v[i]) for i in range(n - j)])
    return table


def divided_difference_hp(v: NodeVector, f, bits: int):
    """``[v_1, ..., v_n]f`` as an mpf computed at ``bits`` precision."""
    ctx = context(bits)
    nodes = [ctx.mpf(a) for a in v]
    return _newton_table(nodes, [f.value(a, ctx) for a in nodes])[-1][0]


def divided_difference(v: Iterable[float] | NodeVector, f, cfg: PrecisionConfig | None = None) -> DividedDiffResult:
    """Newton divided-difference table of ``f`` on the (sorted) nodes ``v``.

    Runs in double precision unless ``cfg`` is given or two consecutive nodes
    are closer than ``TIGHT_GAP``, in which case the table is built at
    ``cfg.mantissa_bits`` and rounded to floats afterwards.
    """
    v = sorted_nodes(v)
    tight = any(b - a < TIGHT_GAP for a, b in zip(v, v[1:]))
    if cfg is None and not tight:
        table = _newton_table(v.values, [f.value(a) for a in v])
    else:
        ctx = context((cfg or PrecisionConfig()).mantissa_bits)
        nodes = [ctx.mpf(a) for a in v]
        hp = _newton_table(nodes, [f.value(a, ctx) for a in nodes])
        table = [[float(q) for q in row] for row in hp]
    return DividedDiffResult(table[-1][0], table)


def mean_derivative_approx(v: Iterable[float] | NodeVector, f: SmoothExpFamily) -> float:
    v = sorted_nodes(v)
    n = len(v)
    mean, _ = centered_moments(v)
    return f.derivative(n - 1, mean) / math.factorial(n - 1)


def lemma2_residual_bounds(
    v: Iterable[float] | NodeVector, f: SmoothExpFamily, cfg: PrecisionConfig | None = None
) -> ResidualBounds:
    """Residual of the mean-derivative approximation and its endpoint bracket.

    The residual is ``(S/2) f^(n+1)(xi) / (n+1)!`` for some ``xi`` in the node
    hull, and ``f^(n+1)`` is monotone for this family, so evaluating it at
    the two end nodes brackets the residual. Everything is computed at
    ``cfg`` precision because the residual is a small difference of two
    nearly equal numbers.
    """
    v = sorted_nodes(v)
    cfg = cfg or PrecisionConfig()
    ctx = context(cfg.mantissa_bits)
    n = len(v)
    nodes = [ctx.mpf(a) for a in v]
    dd = _newton_table(nodes, [f.value(a, ctx) for a in nodes])[-1][0]
    mean = ctx.fsum(nodes) / n
    approx = f.derivative(n - 1, mean, ctx) / ctx.factorial(n - 1)
    S = ctx.fsum((a - mean) ** 2 for a in nodes)
    ends = [f.derivative(n + 1, nodes[0], ctx), f.derivative(n + 1, nodes[-1], ctx)]
    scale = S / 2 / ctx.factorial(n + 1)
    return ResidualBounds(float(dd - approx), float(scale * min(ends)), float(scale * max(ends)))


def p_vector(x: Iterable[float] | NodeVector) -> NodeVector:
    """``p_i = s(x) - x_{n+1-i}``, the nodes of the lower-bound divided difference."""
    x = validate_nodes(x)
    s = node_sum(x)
    return validate_nodes(s - a for a in reversed(x.values))


def dd_family(n: int, u_sum: float) -> SmoothExpFamily:
    """``f(a) = exp(c a) / c**(n-1)`` with ``c = u_sum / (n-1)``; plain ``exp(u_sum a)`` for n = 1."""
    if not u_sum > 0:
        raise InvalidUSum(f"u_sum must be positive, got {u_sum!r}")
    if n == 1:
        return SmoothExpFamily(u_sum, 0)
    return SmoothExpFamily(u_sum / (n - 1), n - 1)


def dd_lower_bound_check(
    x: Iterable[float] | NodeVector, u_sum: float, cfg: PrecisionConfig | None = None
) -> DDLowerBound:
    """``[p_1..p_n]f`` and its lower bound ``exp(u_sum s(x)/n) / (n-1)!``.

    The bound is the mean-derivative term at the same ``f``; since
    ``f^(n-1)(a) = exp(c a)`` the ``c**(n-1)`` prefactor cancels.
    """
    x = validate_nodes(x)
    n = len(x)
    f = dd_family(n, u_sum)
    p = p_vector(x)
    cfg = cfg or PrecisionConfig()
    dd = divided_difference_hp(p, f, cfg.mantissa_bits)
    ctx = context(cfg.mantissa_bits)
    mean = ctx.fsum(ctx.mpf(a) for a in p) / n
    bound = f.derivative(n - 1, mean, ctx) / ctx.factorial(n - 1)
    return DDLowerBound(float(dd), float(bound))

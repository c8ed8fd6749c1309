"""Univariate Gaussian kernel matrices: determinant bounds, shape selection, interpolation.

The kernel matrix is ``B = [exp(-lam (t_j - t_i)**2 / 2)]``. Nodes may be
passed in any order; they are sorted on ingestion, which leaves ``det(B)``
unchanged (simultaneous row and column permutation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateNodes, DimensionMismatch, InvalidLambda, PositivityViolated, PrecisionExhausted
from .expdet import LogBounds
from .highprec import LogNumber, PrecisionConfig, context, escalate, lu_logdet, lu_solve
from .nodes import NodeVector, centered_moments, log_superfactorial, log_vandermonde, sorted_nodes

# Relative residual accepted after an interpolation solve.
SOLVE_RTOL = 1e-8
LOOCV_RTOL = 1e-10


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidLambda(f"lambda must be positive and finite, got {lam!r}")
    return lam


@dataclass(frozen=True)
class GaussianModel:
    t: NodeVector
    lam: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", sorted_nodes(self.t))
        object.__setattr__(self, "lam", _check_lambda(self.lam))

    @property
    def n(self) -> int:
        return len(self.t)


@dataclass
class SweepRow:
    lam: float
    log_f: float
    log_lower: float
    log_upper: float
    log_det: float = math.nan
    loocv: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Interpolant:
    """Coefficients are aligned with the sorted nodes ``t``.

    ``coefficients`` are rounded to floats; ``exact`` keeps the solution at
    the working precision ``bits``. Near the flat limit only the latter
    reproduces the data, since rounding alone perturbs the fit by about
    cond(B) * 1e-16.
    """

    t: NodeVector
    lam: float
    coefficients: list[float]
    residual: float = 0.0
    bits: int = 0
    exact: list = field(default_factory=list, repr=False, compare=False)

    def __call__(self, queries: Sequence[float]) -> np.ndarray:
        if self.exact:
            return evaluate(self.t, self.exact, self.lam, queries, bits=self.bits)
        return evaluate(self.t, self.coefficients, self.lam, queries)


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def build_gaussian(model: GaussianModel, cfg: PrecisionConfig | int) -> list[list]:
    bits = cfg if isinstance(cfg, int) else cfg.mantissa_bits
    ctx = context(bits)
    t = [ctx.mpf(v) for v in model.t]
    half_lam = ctx.mpf(model.lam) / 2
    n = len(t)
    b = [[ctx.one] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            b[i][j] = b[j][i] = ctx.exp(-half_lam * (t[j] - t[i]) ** 2)
    return b


def logdet_gaussian(model: GaussianModel, cfg: PrecisionConfig | None = None) -> LogNumber:
    cfg = cfg or PrecisionConfig()
    value, _ = escalate(lambda bits: lu_logdet(build_gaussian(model, bits), bits), cfg)
    if value.sign != 1:
        raise PositivityViolated(f"det(B) came out with sign {value.sign}", witness=model)
    return value.to_float()


def gaussian_bounds(model: GaussianModel) -> LogBounds:
    n = model.n
    _, S = centered_moments(model.t)
    upper = pair_count(n) * math.log(model.lam) - log_superfactorial(n) + 2 * log_vandermonde(model.t)
    return LogBounds(upper - model.lam * S, upper)


def select_shape(t: Iterable[float] | NodeVector) -> float:
    """The maximizer ``N/S`` of ``lam**N * exp(-lam S)``."""
    t = sorted_nodes(t)
    _, S = centered_moments(t)
    if len(t) < 2 or S == 0:
        raise DegenerateNodes("shape selection needs at least two distinct nodes")
    return pair_count(len(t)) / S


def shape_objective(t: Iterable[float] | NodeVector, lam: float) -> float:
    """``log(lam**N * exp(-lam S))``."""
    lam = _check_lambda(lam)
    t = sorted_nodes(t)
    _, S = centered_moments(t)
    return pair_count(len(t)) * math.log(lam) - lam * S


def resolve_lambda(t: NodeVector, lam: float | str) -> float:
    if isinstance(lam, str):
        if lam != "auto":
            raise InvalidLambda(f"lambda must be a positive number or 'auto', got {lam!r}")
        return select_shape(t)
    return _check_lambda(lam)


def _paired(t: Iterable[float] | NodeVector, values: Sequence[float]) -> tuple[NodeVector, list[float]]:
    t_raw = list(t)
    values = [float(v) for v in values]
    if len(values) != len(t_raw):
        raise DimensionMismatch(f"{len(values)} values for {len(t_raw)} nodes")
    order = sorted(range(len(t_raw)), key=lambda i: t_raw[i])
    return sorted_nodes(t_raw), [values[i] for i in order]


def interpolate(
    t: Iterable[float] | NodeVector,
    values: Sequence[float],
    lam: float | str = "auto",
    cfg: PrecisionConfig | None = None,
) -> Interpolant:
    """Solve ``B c = values`` at escalating precision until the residual is small.

    Values are reordered together with the nodes when ``t`` is unsorted.
    """
    cfg = cfg or PrecisionConfig()
    nodes, vals = _paired(t, values)
    model = GaussianModel(nodes, resolve_lambda(nodes, lam))
    scale = max((abs(v) for v in vals), default=0.0)
    if scale == 0:
        return Interpolant(nodes, model.lam, [0.0] * len(vals), 0.0, cfg.mantissa_bits)
    bits = cfg.mantissa_bits
    res = math.inf
    for _ in range(cfg.max_escalations + 1):
        ctx = context(bits)
        b = build_gaussian(model, bits)
        try:
            (c,) = lu_solve(b, [vals], bits)
        except ZeroDivisionError:
            bits *= 2
            continue
        res = float(max(abs(ctx.fsum(bij * cj for bij, cj in zip(row, c)) - v) for row, v in zip(b, vals))) / scale
        if res <= SOLVE_RTOL:
            return Interpolant(nodes, model.lam, [float(ci) for ci in c], res, bits, list(c))
        bits *= 2
    bits //= 2
    raise PrecisionExhausted(f"interpolation residual {res:.3g} above {SOLVE_RTOL:g} at {bits} bits", bits=bits)


def evaluate(
    t: Iterable[float] | NodeVector,
    coefficients: Sequence[float],
    lam: float,
    queries: Sequence[float],
    bits: int | None = None,
) -> np.ndarray:
    """``s(q) = sum_j c_j exp(-lam (q - t_j)**2 / 2)`` at each query point.

    Runs in double precision, or at ``bits`` precision when given (results
    are rounded to floats either way).
    """
    t = [float(v) for v in t]
    lam = _check_lambda(lam)
    if len(t) != len(coefficients):
        raise DimensionMismatch(f"{len(coefficients)} coefficients for {len(t)} nodes")
    if bits is None:
        tt = np.asarray(t)
        q = np.asarray(queries, dtype=float)
        phi = np.exp(-lam * (q[:, None] - tt[None, :]) ** 2 / 2)
        return phi @ np.asarray(coefficients, dtype=float)
    ctx = context(bits)
    half_lam = ctx.mpf(lam) / 2
    c = [ctx.convert(ci) for ci in coefficients]
    out = []
    for q in queries:
        qm = ctx.mpf(q)
        out.append(float(ctx.fsum(cj * ctx.exp(-half_lam * (qm - tj) ** 2) for cj, tj in zip(c, t))))
    return np.array(out)


def _loocv_at(model: GaussianModel, vals: list[float], bits: int) -> list:
    ctx = context(bits)
    n = model.n
    b = build_gaussian(model, bits)
    unit = [[ctx.one if i == k else ctx.zero for i in range(n)] for k in range(n)]
    sols = lu_solve(b, [vals] + unit, bits)
    c, inv_cols = sols[0], sols[1:]
    return [c[k] / inv_cols[k][k] for k in range(n)]


def loocv_residuals(
    t: Iterable[float] | NodeVector, values: Sequence[float], lam: float, cfg: PrecisionConfig | None = None
) -> list[float]:
    """Leave-one-out errors ``e_k = c_k / (B^-1)_kk`` in sorted-node order."""
    cfg = cfg or PrecisionConfig()
    nodes, vals = _paired(t, values)
    if len(nodes) < 2:
        raise DegenerateNodes("leave-one-out needs at least two nodes")
    model = GaussianModel(nodes, lam)
    bits = cfg.mantissa_bits
    prev = _loocv_at(model, vals, bits)
    for _ in range(cfg.max_escalations):
        bits *= 2
        cur = _loocv_at(model, vals, bits)
        scale = max(max(abs(e) for e in cur), 1e-300)
        if max(abs(a - b) for a, b in zip(prev, cur)) <= LOOCV_RTOL * scale:
            return [float(e) for e in cur]
        prev = cur
    raise PrecisionExhausted(f"leave-one-out residuals unstable up to {bits} bits", bits=bits)


def loocv_error(
    t: Iterable[float] | NodeVector, values: Sequence[float], lam: float, cfg: PrecisionConfig | None = None
) -> float:
    """Root-mean-square leave-one-out residual."""
    if not any(values):
        return 0.0
    e = loocv_residuals(t, values, lam, cfg)
    return math.sqrt(math.fsum(x * x for x in e) / len(e))


def geometric_grid(lo: float, hi: float, count: int) -> list[float]:
    if not (0 < lo <= hi) or count < 1:
        raise InvalidLambda(f"bad lambda grid {lo}:{hi}:{count}")
    return [float(v) for v in np.geomspace(lo, hi, count)]


def sweep(
    t: Iterable[float] | NodeVector,
    lambda_grid: Sequence[float],
    values: Sequence[float] | None = None,
    cfg: PrecisionConfig | None = None,
    slack: float = 1e-9,
) -> list[SweepRow]:
    """One row per grid value: objective, bounds, oracle log-det and optional LOOCV.

    A row whose oracle fails carries the error message instead of raising.
    """
    if values is not None:
        t, values = _paired(t, values)
    else:
        t = sorted_nodes(t)
    rows = []
    for lam in lambda_grid:
        model = GaussianModel(t, lam)
        bounds = gaussian_bounds(model)
        row = SweepRow(model.lam, shape_objective(t, model.lam), bounds.log_lower, bounds.log_upper)
        try:
            row.log_det = logdet_gaussian(model, cfg).log_abs
            if not bounds.contains(row.log_det, slack):
                row.error = "BoundViolated"
            if values is not None:
                row.loocv = loocv_error(t, values, model.lam, cfg)
        except (PrecisionExhausted, PositivityViolated) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows

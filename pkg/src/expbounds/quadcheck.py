"""Tensor-product Gauss-Legendre checks of the integral identities.

The integration box is ``[x_1, x_2] x [x_2, x_3] x ... x [x_{n-1}, x_n]``,
one variable ``t_k`` per consecutive node interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divdiff import dd_family, divided_difference_hp, p_vector
from .errors import InvalidOrder, PrecisionExhausted, TooManyDims
from .expdet import ExpMatrixSpec, logdet_exp
from .highprec import PrecisionConfig
from .nodes import NodeVector, log_vandermonde, validate_nodes

# Largest |t_i * u_j| allowed before the double-precision det(B) would overflow.
EXPONENT_BUDGET = 300.0


@dataclass(frozen=True)
class QuadratureConfig:
    order: int = 24
    max_dims: int = 4

    def __post_init__(self) -> None:
        if self.order < 2:
            raise InvalidOrder(f"order must be at least 2, got {self.order}")


def box_grid(x: NodeVector, cfg: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature points, shape ``(M, n-1)``, and weights, shape ``(M,)``."""
    x = validate_nodes(x)
    dims = len(x) - 1
    if dims < 1:
        raise TooManyDims("need at least two nodes to form an integration box")
    if dims > cfg.max_dims:
        raise TooManyDims(f"{dims} dimensions exceeds max_dims = {cfg.max_dims}")
    if cfg.order < 2:
        raise InvalidOrder(f"order must be at least 2, got {cfg.order}")
    g, w = np.polynomial.legendre.leggauss(cfg.order)
    axes, weights = [], []
    for a, b in zip(x.values, x.values[1:]):
        half = 0.5 * (b - a)
        axes.append(a + half * (g + 1.0))
        weights.append(half * w)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)
    wts = np.prod(np.stack(np.meshgrid(*weights, indexing="ij"), axis=-1).reshape(-1, dims), axis=1)
    return pts, wts


def vandermonde_rows(t: np.ndarray) -> np.ndarray:
    """V(t) for every row of ``t``."""
    m = t.shape[1]
    out = np.ones(t.shape[0])
    for i in range(m):
        for j in range(i + 1, m):
            out *= t[:, j] - t[:, i]
    return out


def nested_integral(x: NodeVector, cfg: QuadratureConfig | None = None, exp_scale: float | None = None) -> float:
    """Integral of ``V(t)`` (or ``V(t) * exp(exp_scale * s(t))``) over the node box."""
    cfg = cfg or QuadratureConfig()
    pts, wts = box_grid(x, cfg)
    g = vandermonde_rows(pts)
    if exp_scale is not None:
        g = g * np.exp(exp_scale * pts.sum(axis=1))
    return math.fsum(wts * g)


def check_corollary_identity(x: NodeVector, cfg: QuadratureConfig | None = None) -> float:
    """Relative error of the quadrature against ``V(x) / (n-1)!``."""
    x = validate_nodes(x)
    exact = math.exp(log_vandermonde(x) - math.lgamma(len(x)))
    return abs(nested_integral(x, cfg) - exact) / exact


def check_theorem_identity(
    x: NodeVector, u_sum: float, cfg: QuadratureConfig | None = None, prec: PrecisionConfig | None = None
) -> float:
    """Relative error of the quadrature against ``V(x) * [p_1..p_n]f``.

    With ``c = u_sum/(n-1)`` and ``f(a) = exp(c a)/c**(n-1)`` we have
    ``f^(n-1)(s(t)) = exp(c s(t))``, so the integrand is ``V(t) exp(c s(t))``
    with no further prefactor.
    """
    x = validate_nodes(x)
    n = len(x)
    f = dd_family(n, u_sum)
    quad = nested_integral(x, cfg, exp_scale=f.c)
    prec = prec or PrecisionConfig()
    dd = divided_difference_hp(p_vector(x), f, prec.mantissa_bits)
    exact = float(dd) * math.exp(log_vandermonde(x))
    return abs(quad - exact) / abs(exact)


def _det_stack(m: np.ndarray) -> np.ndarray:
    k = m.shape[-1]
    if k == 1:
        return m[:, 0, 0]
    if k == 2:
        return m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    if k == 3:
        return (
            m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
        )
    raise TooManyDims(f"cofactor expansion implemented up to 3x3, got {k}x{k}")


def reduction_integral(spec: ExpMatrixSpec, cfg: QuadratureConfig | None = None) -> float:
    """ln of ``exp(s(x) y_1) u_1...u_{n-1} * integral det(B(t, u)) dt``."""
    cfg = cfg or QuadratureConfig()
    if spec.n < 2:
        raise TooManyDims("the reduction needs n >= 2")
    y = np.array(spec.y.values)
    u = y[1:] - y[0]
    pts, wts = box_grid(spec.x, cfg)
    expo = pts[:, :, None] * u[None, None, :]
    if np.abs(expo).max() > EXPONENT_BUDGET:
        raise PrecisionExhausted(f"exponents reach {np.abs(expo).max():.1f}, beyond double-precision budget")
    dets = _det_stack(np.exp(expo))
    integral = math.fsum(wts * dets)
    s_x = math.fsum(spec.x)
    return s_x * spec.y[0] + math.fsum(np.log(u)) + math.log(integral)


def check_lemma1_reduction(
    spec: ExpMatrixSpec, cfg: QuadratureConfig | None = None, prec: PrecisionConfig | None = None
) -> float:
    """Relative difference between the integral form of det(A) and the oracle."""
    rhs = reduction_integral(spec, cfg)
    lhs = logdet_exp(spec, prec).log_abs
    return abs(math.expm1(rhs - lhs))

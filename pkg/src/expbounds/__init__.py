"""Determinant bounds for exponential and univariate Gaussian kernel matrices."""

from .errors import (
    DegenerateNodes,
    DimensionMismatch,
    Empty,
    ExpBoundsError,
    InvalidInput,
    InvalidLambda,
    InvalidOrder,
    InvalidUSum,
    NonFinite,
    NotStrictlyIncreasing,
    NTooLarge,
    PositivityViolated,
    PrecisionExhausted,
    TooManyDims,
)
from .expdet import (
    ExpMatrixSpec,
    LogBounds,
    build_matrix,
    hadamard_log_upper,
    logdet_exp,
    theorem_bounds,
    total_positivity_check,
)
from .gaussrbf import (
    GaussianModel,
    build_gaussian,
    evaluate,
    gaussian_bounds,
    geometric_grid,
    interpolate,
    logdet_gaussian,
    loocv_error,
    select_shape,
    shape_objective,
    sweep,
)
from .highprec import LogNumber, PrecisionConfig, escalate, lu_logdet
from .nodes import NodeVector, centered_moments, log_superfactorial, log_vandermonde, node_sum, validate_nodes

__version__ = "0.1.0"

"""Nonnegative low multilinear-rank tensor approximation by alternating projections."""

from .solver import ConvergenceTrace, SolverConfig, SolverResult, flops_estimate, nlrt_approximate
from .svd import SvdTriplets, gram_eigs, truncated_svd
from .tensor import fold, fro_norm, inner, mode_product, unfold

__all__ = [
    "ConvergenceTrace",
    "SolverConfig",
    "SolverResult",
    "SvdTriplets",
    "flops_estimate",
    "fold",
    "fro_norm",
    "gram_eigs",
    "inner",
    "mode_product",
    "nlrt_approximate",
    "truncated_svd",
    "unfold",
]

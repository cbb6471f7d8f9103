"""Projections used by the alternating-projection solver.

A point of the product space is a list of ``m`` same-shaped tensors, one per
mode. ``Omega1`` holds the constant tuples whose common value is
nonnegative; ``Omega2`` holds the tuples whose ``k``-th part has mode-``k``
rank ``r_k``.
"""

import math

import numpy as np

from .svd import truncated_svd
from .tensor import fold, unfold


def check_ranks(shape, ranks):
    """Validate a multilinear rank against ``shape`` and return it as a tuple of ints."""
    shape = tuple(shape)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != len(shape):
        raise ValueError(f"{len(ranks)} ranks given for a {len(shape)}-mode tensor")
    total = math.prod(int(n) for n in shape)
    for k, (r, n) in enumerate(zip(ranks, shape)):
        bound = min(n, total // n)
        if not 1 <= r <= bound:
            raise ValueError(f"rank {r} for mode {k} outside 1..{bound}")
    return ranks


def project_nonneg(t):
    """Elementwise ``max(t, 0)``: the nearest nonnegative tensor."""
    return np.maximum(t, 0.0)


def project_mode_k(t, k, r, method="lapack"):
    """Best approximation of ``t`` whose mode-``k`` unfolding has rank at most ``r``.

    Returns the folded truncation and the triplets used. When the unfolding
    has fewer than ``r`` nonzero singular values the result is the plain
    truncation and ``triplets.deficient`` is set.
    """
    t = np.asarray(t)
    mat = unfold(t, k)
    trip = truncated_svd(mat, r, method=method)
    u = trip.left
    return fold(u @ (u.T @ mat), k, t.shape), trip


def _check_point(parts):
    if len(parts) == 0:
        raise ValueError("empty product point")
    shape = np.shape(parts[0])
    if len(parts) != len(shape):
        raise ValueError(f"a point for a {len(shape)}-mode tensor needs {len(shape)} parts, got {len(parts)}")
    for p in parts[1:]:
        if np.shape(p) != shape:
            raise ValueError(f"inconsistent part shapes {np.shape(p)} vs {shape}")
    return shape


def omega1_mean(parts):
    """Common value ``(1/m) sum_k max(parts[k], 0)`` of the Omega1 projection.

    Summation runs over parts in index order so the result does not depend on
    how the parts were produced.
    """
    _check_point(parts)
    acc = project_nonneg(parts[0])
    for p in parts[1:]:
        acc += project_nonneg(p)
    acc /= len(parts)
    return acc


def project_omega1(parts):
    """Project a product point onto Omega1; every returned part is the same array."""
    common = omega1_mean(parts)
    return [common] * len(parts)


def project_omega2_common(t, ranks, method="lapack"):
    """Project the constant tuple ``(t, ..., t)`` onto Omega2.

    Returns the ``m`` parts and their triplets.
    """
    ranks = check_ranks(np.shape(t), ranks)
    parts, trips = [], []
    for k, r in enumerate(ranks):
        z, trip = project_mode_k(t, k, r, method=method)
        parts.append(z)
        trips.append(trip)
    return parts, trips


def project_omega2(parts, ranks, method="lapack"):
    """Project a general product point onto Omega2, part ``k`` with its own mode-``k`` truncation."""
    shape = _check_point(parts)
    ranks = check_ranks(shape, ranks)
    out, trips = [], []
    for k, (p, r) in enumerate(zip(parts, ranks)):
        z, trip = project_mode_k(p, k, r, method=method)
        out.append(z)
        trips.append(trip)
    return out, trips


def in_omega1(parts):
    """Membership test for Omega1: identical, nonnegative parts."""
    _check_point(parts)
    first = np.asarray(parts[0])
    return bool(np.all(first >= 0)) and all(np.array_equal(first, p) for p in parts[1:])

"""Alternating projections for nonnegative low multilinear-rank approximation.

Starting from ``Z = (A, ..., A)`` the solver repeats

    Y <- Omega1 projection of Z      (mean of the clipped parts)
    Z <- Omega2 projection of Y      (per-mode rank truncation of the common tensor)

until the relative change of the common tensor ``Y`` between two sweeps
drops below ``tol``. ``Y`` is returned as the approximation: it is exactly
nonnegative and, at convergence, within ``tol`` of each low-rank part.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .projections import check_ranks, omega1_mean, project_omega2_common
from .tensor import fold

log = logging.getLogger(__name__)

# inputs may carry rounding noise below zero from upstream arithmetic
NEG_TOL = 1e-12
EPS = np.finfo(np.float64).eps


@dataclass
class SolverConfig:
    ranks: tuple
    tol: float = 1e-5
    max_iters: int = 5000
    trace_every: int = 1
    eig_method: str = "lapack"

    def __post_init__(self):
        self.ranks = tuple(int(r) for r in self.ranks)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")


@dataclass
class ConvergenceTrace:
    """Per-iteration monitors.

    ``distance`` is the product-space distance ``||Z - Y||`` between the two
    iterates of a sweep and ``objective`` is ``||A - Y||_F``. ``rel_change``
    is NaN on the first sweep, which has no predecessor.
    """

    iteration: list = field(default_factory=list)
    rel_change: list = field(default_factory=list)
    distance: list = field(default_factory=list)
    objective: list = field(default_factory=list)

    def append(self, s, change, dist, obj):
        self.iteration.append(s)
        self.rel_change.append(change)
        self.distance.append(dist)
        self.objective.append(obj)

    def __len__(self):
        return len(self.iteration)

    def rows(self):
        return list(zip(self.iteration, self.rel_change, self.distance, self.objective))


@dataclass
class SolverResult:
    approximation: np.ndarray
    mode_factors: list
    iterations: int
    converged: bool
    trace: ConvergenceTrace
    rank_deficient: bool = False

    def mode_part(self, k):
        """The rank-``r_k`` part ``Z_k`` of the final Omega2 projection."""
        return fold(self.mode_factors[k].reconstruct(), k, self.approximation.shape)


def nlrt_approximate(a, cfg):
    """Nonnegative approximation of ``a`` with multilinear rank ``cfg.ranks``.

    Raises ``ValueError`` for inputs with entries below ``-1e-12``, invalid
    ranks or non-finite values, and ``FloatingPointError`` if an iterate
    stops being finite.
    """
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("input tensor contains non-finite values")
    if a.size and a.min() < -NEG_TOL:
        raise ValueError(f"input tensor has negative entries (min {a.min():.3e})")
    ranks = check_ranks(a.shape, cfg.ranks)

    z = [a] * a.ndim
    y_prev = None
    trace = ConvergenceTrace()
    converged = False
    deficient = False
    trips = None
    y = None
    s = 0
    for s in range(1, cfg.max_iters + 1):
        y = omega1_mean(z)
        z, trips = project_omega2_common(y, ranks, method=cfg.eig_method)
        deficient = deficient or any(t.deficient for t in trips)

        dist = math.sqrt(sum(float(np.sum((zk - y) ** 2)) for zk in z))
        if not math.isfinite(dist):
            raise FloatingPointError(f"non-finite iterate at sweep {s}")
        if y_prev is None:
            change = math.nan
        else:
            change = float(np.linalg.norm(y - y_prev)) / max(float(np.linalg.norm(y_prev)), EPS)
        done = y_prev is not None and change < cfg.tol
        if s % cfg.trace_every == 0 or done or s == cfg.max_iters or s == 1:
            trace.append(s, change, dist, float(np.linalg.norm(a - y)))
        if done:
            converged = True
            break
        y_prev = y

    if not converged:
        log.info("no convergence after %d sweeps", cfg.max_iters)
    return SolverResult(
        approximation=y,
        mode_factors=trips,
        iterations=s,
        converged=converged,
        trace=trace,
        rank_deficient=deficient,
    )


def flops_estimate(shape, ranks):
    """Per-sweep cost ``prod(n_j) * sum(r_i)`` with unit constant.

    Returns ``(value, saturated)``; the value is clipped to the int64 range.
    """
    ranks = check_ranks(shape, ranks)
    value = math.prod(int(n) for n in shape) * sum(ranks)
    cap = np.iinfo(np.int64).max
    if value > cap:
        return cap, True
    return value, False

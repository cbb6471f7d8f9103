"""Nonnegative Tucker (NTD) and CP (NCPD) baselines.

Multiplicative updates follow Lee-Seung for the least-squares loss applied
to each unfolding; HALS solves one factor column (or one core entry) at a
time in closed form and clips at zero. All four solvers stop when the
relative change between successive reconstructions drops below ``tol``.
"""

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .datagen import make_rng
from .projections import check_ranks
from .tensor import fold, fro_norm, mode_product, multi_mode_product, unfold, cyclic_modes


@dataclass
class FitConfig:
    tol: float = 1e-5
    max_iters: int = 5000
    seed: int = 0
    eps: float = 1e-16


@dataclass
class TuckerFactors:
    core: np.ndarray
    factors: list


@dataclass
class CpFactors:
    weights: np.ndarray
    factors: list

    @property
    def rank(self):
        return len(self.weights)


@dataclass
class FitTrace:
    """Objective ``||A - X_s||_F`` and relative reconstruction change per sweep."""

    objective: list = field(default_factory=list)
    rel_change: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def reconstruct_tucker(f):
    """``core x_0 P_0 x_1 P_1 ...``."""
    core = np.asarray(f.core)
    if len(f.factors) != core.ndim:
        raise ValueError(f"{len(f.factors)} factors for a {core.ndim}-mode core")
    for k, p in enumerate(f.factors):
        if p.shape[1] != core.shape[k]:
            raise ValueError(f"factor {k} has {p.shape[1]} columns, core mode {k} has size {core.shape[k]}")
    return multi_mode_product(core, f.factors)


def khatri_rao(mats):
    """Column-wise Kronecker product with the rows of ``mats[0]`` varying fastest."""
    z = mats[0].shape[1]
    out = mats[0]
    for m in mats[1:]:
        if m.shape[1] != z:
            raise ValueError("all Khatri-Rao operands need the same number of columns")
        out = (m[:, None, :] * out[None, :, :]).reshape(-1, z)
    return out


def reconstruct_cp(f):
    """``sum_z weights[z] a^{z,0} o a^{z,1} o ...``."""
    factors = f.factors
    z = len(f.weights)
    if any(a.shape[1] != z for a in factors):
        raise ValueError("factor column counts must equal the number of weights")
    shape = tuple(a.shape[0] for a in factors)
    kr = khatri_rao([factors[j] for j in cyclic_modes(len(factors), 0)])
    return fold((factors[0] * f.weights) @ kr.T, 0, shape)


def normalize_cp(f):
    """Unit-norm factor columns with the scale collected in the weights.

    Zero columns are left as they are and contribute a zero weight.
    """
    weights = np.array(f.weights, dtype=np.float64)
    factors = []
    for a in f.factors:
        norms = np.linalg.norm(a, axis=0)
        safe = np.where(norms > 0, norms, 1.0)
        factors.append(a / safe)
        weights = weights * norms
    return CpFactors(weights=weights, factors=factors)


def cp_rank_candidates(ranks):
    """CP ranks tried against a multilinear rank: product, sum and maximum."""
    ranks = [int(r) for r in ranks]
    return sorted({math.prod(ranks), sum(ranks), max(ranks)}, reverse=True)


def _check_input(a):
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("input tensor contains non-finite values")
    if a.min() < 0:
        raise ValueError("baselines need a nonnegative input tensor")
    return a


def _converge(a, cfg, sweep, reconstruct):
    """Shared loop: call ``sweep()`` until the reconstruction settles."""
    trace = FitTrace()
    x_prev = reconstruct()
    trace.objective.append(fro_norm(a - x_prev))
    trace.rel_change.append(math.nan)
    for s in range(1, cfg.max_iters + 1):
        sweep()
        x = reconstruct()
        change = fro_norm(x - x_prev) / max(fro_norm(x_prev), np.finfo(float).eps)
        trace.objective.append(fro_norm(a - x))
        trace.rel_change.append(change)
        trace.iterations = s
        if not math.isfinite(change):
            raise FloatingPointError(f"non-finite reconstruction at sweep {s}")
        if change < cfg.tol:
            trace.converged = True
            break
        x_prev = x
    return trace


# -- Tucker -------------------------------------------------------------------


def _init_tucker(a, ranks, seed):
    rng = make_rng(seed)
    core = rng.random(ranks)
    factors = [rng.random((n, r)) for n, r in zip(a.shape, ranks)]
    x = multi_mode_product(core, factors)
    core *= fro_norm(a) / max(fro_norm(x), np.finfo(float).tiny)
    return core, factors


def _tucker_mode_terms(a, core, factors, k):
    """Numerator ``A_k B_k^T`` and Gram ``B_k B_k^T`` of the mode-k subproblem, ``B_k`` the core side."""
    w = multi_mode_product(a, factors, skip=k, transpose=True)
    grams = [p.T @ p for p in factors]
    sg = multi_mode_product(core, grams, skip=k)
    s_k = unfold(core, k)
    return unfold(w, k) @ s_k.T, unfold(sg, k) @ s_k.T


def ntd_mu(a, ranks, cfg=None):
    """Nonnegative Tucker decomposition by multiplicative updates."""
    cfg = cfg or FitConfig()
    a = _check_input(a)
    ranks = check_ranks(a.shape, ranks)
    core, factors = _init_tucker(a, ranks, cfg.seed)
    eps = cfg.eps

    def sweep():
        nonlocal core
        for k in range(a.ndim):
            num, gram = _tucker_mode_terms(a, core, factors, k)
            factors[k] = factors[k] * num / (factors[k] @ gram + eps)
        num = multi_mode_product(a, factors, transpose=True)
        den = multi_mode_product(core, [p.T @ p for p in factors])
        core = core * num / (den + eps)

    trace = _converge(a, cfg, sweep, lambda: multi_mode_product(core, factors))
    return TuckerFactors(core=core, factors=factors), trace


def _hals_columns(p, num, gram, eps):
    """One HALS pass over the columns of ``p`` for ``min ||Y - p B||`` given ``num = Y B^T``, ``gram = B B^T``."""
    for j in range(p.shape[1]):
        step = (num[:, j] - p @ gram[:, j]) / max(gram[j, j], eps)
        p[:, j] = np.maximum(p[:, j] + step, 0.0)
    return p


def _hals_core(core, num, grams, eps):
    """Coordinate descent on the core entries for fixed factors."""
    resid = multi_mode_product(core, grams) - num
    for idx in np.ndindex(core.shape):
        curv = math.prod(g[i, i] for g, i in zip(grams, idx))
        if curv <= eps:
            continue
        new = max(core[idx] - resid[idx] / curv, 0.0)
        delta = new - core[idx]
        if delta != 0.0:
            core[idx] = new
            resid += delta * reduce(np.multiply.outer, [g[:, i] for g, i in zip(grams, idx)])
    return core


def ntd_hals(a, ranks, cfg=None):
    """Nonnegative Tucker decomposition by hierarchical ALS.

    Factor columns are updated in closed form, renormalised to unit length
    with the scale pushed into the core, then the core is refined entry by
    entry.
    """
    cfg = cfg or FitConfig()
    a = _check_input(a)
    ranks = check_ranks(a.shape, ranks)
    core, factors = _init_tucker(a, ranks, cfg.seed)
    eps = cfg.eps

    def sweep():
        nonlocal core
        for k in range(a.ndim):
            num, gram = _tucker_mode_terms(a, core, factors, k)
            p = _hals_columns(factors[k].copy(), num, gram, eps)
            norms = np.linalg.norm(p, axis=0)
            safe = np.where(norms > 0, norms, 1.0)
            factors[k] = p / safe
            core = mode_product(core, np.diag(np.where(norms > 0, norms, 0.0)), k)
        num = multi_mode_product(a, factors, transpose=True)
        core = _hals_core(core.copy(), num, [p.T @ p for p in factors], eps)

    trace = _converge(a, cfg, sweep, lambda: multi_mode_product(core, factors))
    return TuckerFactors(core=core, factors=factors), trace


# -- CP -------------------------------------------------------------------------


def _init_cp(a, z, seed):
    rng = make_rng(seed)
    factors = [rng.random((n, z)) for n in a.shape]
    f = normalize_cp(CpFactors(weights=np.ones(z), factors=factors))
    x = reconstruct_cp(f)
    f.weights = f.weights * (fro_norm(a) / max(fro_norm(x), np.finfo(float).tiny))
    return f


def _cp_mode_terms(a, factors, t):
    others = cyclic_modes(a.ndim, t)
    kr = khatri_rao([factors[j] for j in others])
    gram = reduce(np.multiply, [factors[j].T @ factors[j] for j in others])
    return unfold(a, t) @ kr, gram


def _cp_inner(f, g):
    """``<reconstruct_cp(f), reconstruct_cp(g)>`` from factor Gram matrices."""
    gram = reduce(np.multiply, [p.T @ q for p, q in zip(f.factors, g.factors)])
    return float(f.weights @ gram @ g.weights)


def _ncpd(a, z, cfg, update):
    cfg = cfg or FitConfig()
    a = _check_input(a)
    z = int(z)
    if z < 1:
        raise ValueError("CP rank must be >= 1")
    state = _init_cp(a, z, cfg.seed)
    norm_a2 = fro_norm(a) ** 2
    last = a.ndim - 1

    def objective(f, inner_ax):
        return math.sqrt(max(norm_a2 - 2.0 * inner_ax + _cp_inner(f, f), 0.0))

    # <A, X> of the initial guess needs one explicit MTTKRP
    num0, _ = _cp_mode_terms(a, state.factors, last)
    trace = FitTrace()
    trace.objective.append(objective(state, float(np.sum(num0 * state.factors[last] * state.weights))))
    trace.rel_change.append(math.nan)
    for s in range(1, cfg.max_iters + 1):
        factors = [f.copy() for f in state.factors]
        factors[0] = factors[0] * state.weights
        for t in range(a.ndim):
            num, gram = _cp_mode_terms(a, factors, t)
            factors[t] = update(factors[t], num, gram, cfg.eps)
        # num is the last-mode MTTKRP against the final other factors
        inner_ax = float(np.sum(num * factors[last]))
        new = normalize_cp(CpFactors(weights=np.ones(z), factors=factors))
        prev2 = _cp_inner(state, state)
        diff2 = prev2 + _cp_inner(new, new) - 2.0 * _cp_inner(new, state)
        change = math.sqrt(max(diff2, 0.0)) / max(math.sqrt(prev2), np.finfo(float).eps)
        state = new
        trace.objective.append(objective(state, inner_ax))
        trace.rel_change.append(change)
        trace.iterations = s
        if not math.isfinite(change):
            raise FloatingPointError(f"non-finite factors at sweep {s}")
        if change < cfg.tol:
            trace.converged = True
            break
    return state, trace


def ncpd_mu(a, z, cfg=None):
    """Nonnegative CP decomposition by multiplicative updates."""
    return _ncpd(a, z, cfg, lambda p, num, gram, eps: p * num / (p @ gram + eps))


def ncpd_hals(a, z, cfg=None):
    """Nonnegative CP decomposition by hierarchical ALS (column-wise updates)."""
    return _ncpd(a, z, cfg, lambda p, num, gram, eps: _hals_columns(p, num, gram, eps))

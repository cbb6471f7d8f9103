"""Synthetic test tensors.

Every generator takes an integer seed and draws from a Philox
(counter-based) bit generator, so output is a deterministic function of the
arguments. Streams match across runs of this package; other
implementations can match the distributions but not the bits.
"""

import numpy as np

from .projections import check_ranks
from .svd import truncated_svd
from .tensor import fro_norm, multi_mode_product, unfold


def make_rng(seed):
    """Philox-backed generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def case1_ground_truth(shape, ranks, seed):
    """Nonnegative low multilinear-rank tensor scaled to a maximum of exactly 1.

    Core and factors have i.i.d. U[0, 1) entries; the product is divided by
    its largest entry.
    """
    shape = tuple(int(n) for n in shape)
    ranks = check_ranks(shape, ranks)
    rng = make_rng(seed)
    core = rng.random(ranks)
    factors = [rng.random((n, r)) for n, r in zip(shape, ranks)]
    x = multi_mode_product(core, factors)
    return x / x.max()


def add_noise_snr(t, snr_db, seed):
    """Add Gaussian noise at ``snr_db`` and clip the noisy tensor at zero.

    The noise is scaled before clipping so that
    ``20 log10(||t|| / ||noise||) == snr_db``.
    """
    t = np.asarray(t, dtype=np.float64)
    snr_db = float(snr_db)
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    if t.min() < 0:
        raise ValueError("add_noise_snr expects a nonnegative tensor")
    noise = make_rng(seed).standard_normal(t.shape)
    noise *= fro_norm(t) / fro_norm(noise) * 10.0 ** (-snr_db / 20.0)
    return np.maximum(t + noise, 0.0)


def case2_random(shape, seed):
    """Tensor with i.i.d. U[0, 1) entries."""
    shape = tuple(int(n) for n in shape)
    return make_rng(seed).random(shape)


def _full_row_rank(core, k):
    n = core.shape[k]
    if n == 1:
        return True
    sig = truncated_svd(unfold(core, k), n).sigmas
    return sig[-1] > 1e-8 * sig[0]


def feasible_point(shape, ranks, seed, max_draws=20):
    """Nonnegative tensor whose multilinear rank is exactly ``ranks``.

    The core is drawn from U[0, 1) until every unfolding has full row rank
    (``sigma_r > 1e-8 sigma_1``); each factor stacks an ``r_k x r_k``
    identity on top of a random nonnegative block, which keeps the factor at
    full column rank.
    """
    shape = tuple(int(n) for n in shape)
    ranks = check_ranks(shape, ranks)
    total = int(np.prod(ranks))
    for k, r in enumerate(ranks):
        if r > total // r:
            raise ValueError(f"rank {r} for mode {k} exceeds the product of the other ranks")
    rng = make_rng(seed)
    for _ in range(max_draws):
        core = rng.random(ranks)
        if all(_full_row_rank(core, k) for k in range(len(ranks))):
            break
    else:
        raise RuntimeError(f"no full-rank core found in {max_draws} draws")
    factors = [np.vstack([np.eye(r), rng.random((n - r, r))]) for n, r in zip(shape, ranks)]
    return multi_mode_product(core, factors)

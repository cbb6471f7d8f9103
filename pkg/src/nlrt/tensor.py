"""Dense tensor primitives: unfolding, folding, k-mode products and norms.

Tensors are plain ``numpy.ndarray`` objects of dtype float64. Modes are
0-based, like numpy axes.

The mode-k unfolding is the ``n_k x prod(n_i, i != k)`` matrix whose columns
enumerate the remaining modes in cyclic order ``k+1, ..., m-1, 0, ..., k-1``
with the first listed mode varying fastest. With column-major storage the
mode-0 unfolding is then a plain reshape.
"""

import numpy as np


def as_tensor(data, copy=False):
    """Return ``data`` as a finite float64 array.

    float32 (or integer) input is widened. Raises ``ValueError`` on NaN/Inf
    or on a 0-d input.
    """
    t = np.array(data, dtype=np.float64) if copy else np.asarray(data, dtype=np.float64)
    if t.ndim < 1:
        raise ValueError("a tensor needs at least one mode")
    if t.size == 0:
        raise ValueError(f"every dimension must be >= 1, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite values")
    return t


def _check_mode(ndim, k):
    if not 0 <= k < ndim:
        raise ValueError(f"mode {k} out of range for a {ndim}-mode tensor")


def cyclic_modes(ndim, k):
    """Order in which the other modes enumerate the columns of unfold(., k)."""
    return [(k + j) % ndim for j in range(1, ndim)]


def unfold(t, k):
    """Mode-``k`` unfolding of ``t`` (see module docstring for the column order)."""
    t = np.asarray(t)
    _check_mode(t.ndim, k)
    perm = [k] + cyclic_modes(t.ndim, k)
    return np.transpose(t, perm).reshape(t.shape[k], -1, order="F")


def fold(mat, k, shape):
    """Inverse of :func:`unfold`: rebuild a tensor of ``shape`` from its mode-``k`` unfolding."""
    mat = np.asarray(mat)
    shape = tuple(int(n) for n in shape)
    _check_mode(len(shape), k)
    others = cyclic_modes(len(shape), k)
    n_cols = int(np.prod([shape[i] for i in others], dtype=np.int64))
    if mat.shape != (shape[k], n_cols):
        raise ValueError(
            f"matrix of shape {mat.shape} cannot be folded along mode {k} "
            f"into {shape}: expected {(shape[k], n_cols)}"
        )
    perm = [k] + others
    t = mat.reshape([shape[i] for i in perm], order="F")
    return np.transpose(t, np.argsort(perm))


def mode_product(t, u, k):
    """k-mode product ``t x_k u``.

    ``u`` has shape ``(p, n_k)``; the result replaces dimension ``n_k`` by ``p``.
    """
    t = np.asarray(t)
    u = np.asarray(u)
    _check_mode(t.ndim, k)
    if u.ndim != 2 or u.shape[1] != t.shape[k]:
        raise ValueError(
            f"cannot multiply mode {k} (size {t.shape[k]}) by a matrix of shape {u.shape}"
        )
    return np.moveaxis(np.tensordot(u, t, axes=(1, k)), 0, k)


def multi_mode_product(t, mats, skip=None, transpose=False):
    """Apply ``t x_0 mats[0] x_1 mats[1] ...``, skipping mode ``skip``.

    With ``transpose=True`` every matrix is transposed first, which is the
    projection onto factor column spaces used by the Tucker baselines.
    """
    for k, u in enumerate(mats):
        if k == skip:
            continue
        t = mode_product(t, u.T if transpose else u, k)
    return t


def inner(a, b):
    """Sum of the elementwise product of two same-shaped tensors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.vdot(a, b))


def fro_norm(t):
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(t).ravel(order="K")))

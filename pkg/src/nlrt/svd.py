"""Top-r truncated SVD for short-fat matrices through the Gram matrix.

Unfoldings of the tensors handled here are ``n_k x N_k`` with ``n_k`` in the
tens or hundreds and ``N_k`` in the tens of thousands, so the left singular
vectors come from the small ``n_k x n_k`` Gram matrix and the right ones are
recovered as ``V = M^T U diag(1/sigma)``.
"""

from dataclasses import dataclass

import numpy as np

# singular values below this fraction of sigma_1 are treated as zero
ZERO_REL = 1e-12


@dataclass(frozen=True)
class SvdTriplets:
    """Dominant singular triplets of a matrix.

    ``left`` is ``n x r``, ``right`` is ``N x r`` and ``sigmas`` is sorted
    descending. ``deficient`` is set when fewer than ``r`` singular values are
    numerically nonzero; the trailing right vectors are then an arbitrary
    orthonormal completion.
    """

    sigmas: np.ndarray
    left: np.ndarray
    right: np.ndarray
    deficient: bool = False

    @property
    def rank(self):
        return len(self.sigmas)

    def reconstruct(self, j=None):
        """Rank-``j`` partial sum ``sum_{i<j} sigma_i u_i v_i^T`` (all triplets by default)."""
        j = self.rank if j is None else j
        if not 0 <= j <= self.rank:
            raise ValueError(f"j={j} outside 0..{self.rank}")
        return (self.left[:, :j] * self.sigmas[:j]) @ self.right[:, :j].T


def jacobi_eigh(g, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` in ascending order, like
    ``numpy.linalg.eigh``. Sweeps stop once the off-diagonal Frobenius norm
    drops below ``tol * ||g||_F``.
    """
    a = np.array(g, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {a.shape}")
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])) + 1e-300:
                    # negligible next to the diagonal; the rotation angle would overflow
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _check_finite(mat):
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got {mat.ndim} dimensions")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix contains non-finite values")
    return mat


def gram_eigs(mat, method="lapack"):
    """Eigendecomposition of ``mat @ mat.T`` with eigenvalues in descending order.

    Small negative eigenvalues produced by rounding are clamped to zero.
    ``method`` is ``"lapack"`` (``numpy.linalg.eigh``) or ``"jacobi"``.
    """
    mat = _check_finite(mat)
    g = mat @ mat.T
    g = 0.5 * (g + g.T)
    if method == "lapack":
        w, q = np.linalg.eigh(g)
    elif method == "jacobi":
        w, q = jacobi_eigh(g)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    w = np.maximum(w[::-1], 0.0)
    return w, q[:, ::-1]


def _fix_signs(u):
    # largest-magnitude entry of each column made nonnegative; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[idx, np.arange(u.shape[1])] < 0, -1.0, 1.0)
    return signs


def _complete_orthonormal(v, start):
    """Replace columns ``start:`` of ``v`` by canonical vectors orthogonalised against the earlier ones."""
    n = v.shape[0]
    e = 0
    for j in range(start, v.shape[1]):
        while True:
            if e >= n:
                raise ValueError("cannot complete an orthonormal basis")
            cand = np.zeros(n)
            cand[e] = 1.0
            e += 1
            for _ in range(2):
                cand -= v[:, :j] @ (v[:, :j].T @ cand)
            norm = np.linalg.norm(cand)
            if norm > 1e-8:
                v[:, j] = cand / norm
                break
    return v


def truncated_svd(mat, r, method="lapack"):
    """The ``r`` dominant singular triplets of ``mat``.

    Tall inputs are handled through their transpose, so the Gram matrix is
    always built on the short side.
    """
    mat = _check_finite(mat)
    n, big_n = mat.shape
    if not 1 <= r <= min(n, big_n):
        raise ValueError(f"rank {r} outside 1..{min(n, big_n)} for a {n}x{big_n} matrix")
    transposed = n > big_n
    work = mat.T if transposed else mat

    w, q = gram_eigs(work, method=method)
    u = q[:, :r].copy()
    sigmas = np.sqrt(w[:r])
    cut = ZERO_REL * sigmas[0]
    live = int(np.count_nonzero(sigmas > cut)) if sigmas[0] > 0 else 0
    sigmas[live:] = 0.0

    v = np.zeros((work.shape[1], r))
    v[:, :live] = (work.T @ u[:, :live]) / sigmas[:live]
    if live < r:
        v = _complete_orthonormal(v, live)
    if transposed:
        u, v = v, u
    signs = _fix_signs(u)
    return SvdTriplets(sigmas=sigmas, left=u * signs, right=v * signs, deficient=live < r)


def truncation_residual(mat, r, method="lapack"):
    """``||mat - best rank-r approximation||_F`` computed from the returned factors."""
    trip = truncated_svd(mat, r, method=method)
    return float(np.linalg.norm(mat - trip.reconstruct()))

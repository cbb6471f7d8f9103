"""Feature ranking curves and spectral-feature k-NN classification.

A residual curve reports ``||A - X(j)||_F / ||A||_F`` where ``X(j)`` keeps
only the ``j`` most important components of a fitted model:

* NLRT: the leading ``j`` singular triplets of the mode-k unfolding;
* NTD: the ``j`` mode-k columns with the largest norm once every slice of
  the partially contracted core has unit Frobenius norm;
* NCPD: the ``j`` rank-one terms with the largest weight once all factor
  columns have unit norm.
"""

from dataclasses import dataclass

import numpy as np

from .baselines import CpFactors, TuckerFactors, normalize_cp, reconstruct_cp, reconstruct_tucker
from .datagen import make_rng
from .solver import SolverResult
from .svd import truncated_svd
from .tensor import fold, fro_norm, multi_mode_product, unfold


@dataclass
class ResidualCurve:
    method: str
    j: np.ndarray
    residual: np.ndarray

    def rows(self):
        return [(self.method, int(j), float(r)) for j, r in zip(self.j, self.residual)]


def _check_count(j_max, bound, what):
    if not 1 <= j_max <= bound:
        raise ValueError(f"{what} must lie in 1..{bound}, got {j_max}")


def _curve(method, a, partial_sums):
    a = np.asarray(a, dtype=np.float64)
    norm_a = fro_norm(a)
    res = [fro_norm(a - x) / norm_a for x in partial_sums]
    return ResidualCurve(method=method, j=np.arange(1, len(res) + 1), residual=np.array(res))


def residual_curve_nlrt(a, result, mode, j_max):
    trip = result.mode_factors[mode]
    _check_count(j_max, trip.rank, "j_max")
    shape = np.shape(a)

    def sums():
        acc = np.zeros((trip.left.shape[0], trip.right.shape[0]))
        for i in range(j_max):
            acc += np.outer(trip.left[:, i] * trip.sigmas[i], trip.right[:, i])
            yield fold(acc, mode, shape)

    return _curve("NLRT", a, sums())


def ntd_ranking(f, mode):
    """Unit-norm mode slices of ``core x_{j != mode} P_j``, rescaled columns of ``P_mode`` and their order."""
    b = multi_mode_product(f.core, f.factors, skip=mode)
    b_k = unfold(b, mode)
    norms = np.linalg.norm(b_k, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    slices = b_k / safe[:, None]
    cols = f.factors[mode] * norms
    order = np.argsort(-np.linalg.norm(cols, axis=0), kind="stable")
    return slices, cols, order


def residual_curve_ntd(a, f, mode, j_max):
    _check_count(j_max, f.core.shape[mode], "j_max")
    slices, cols, order = ntd_ranking(f, mode)
    shape = np.shape(a)

    def sums():
        for j in range(1, j_max + 1):
            idx = order[:j]
            yield fold(cols[:, idx] @ slices[idx], mode, shape)

    return _curve("NTD", a, sums())


def residual_curve_ncpd(a, f, j_max):
    _check_count(j_max, f.rank, "j_max")
    g = normalize_cp(f)
    order = np.argsort(-g.weights, kind="stable")

    def sums():
        for j in range(1, j_max + 1):
            idx = order[:j]
            yield reconstruct_cp(CpFactors(weights=g.weights[idx], factors=[p[:, idx] for p in g.factors]))

    return _curve("NCPD", a, sums())


def spectral_features(source, spectral_mode=2, count=16):
    """Pixel coefficients in the leading ``count`` spectral singular vectors.

    ``source`` is a :class:`SolverResult` (its stored triplets are reused), a
    :class:`TuckerFactors`, a :class:`CpFactors` or a plain tensor; the
    latter three are reconstructed and decomposed here. Returns
    ``(features, basis)`` with one feature row per column of the mode
    unfolding.
    """
    if isinstance(source, SolverResult):
        trip = source.mode_factors[spectral_mode]
        _check_count(count, trip.rank, "count")
        x = source.approximation
        basis = trip.left[:, :count]
    else:
        if isinstance(source, TuckerFactors):
            x = reconstruct_tucker(source)
        elif isinstance(source, CpFactors):
            x = reconstruct_cp(source)
        else:
            x = np.asarray(source, dtype=np.float64)
        mat = unfold(x, spectral_mode)
        _check_count(count, min(mat.shape), "count")
        basis = truncated_svd(mat, count).left
    return unfold(x, spectral_mode).T @ basis, basis


@dataclass
class LabeledPixels:
    features: np.ndarray
    labels: np.ndarray
    train: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        self.train = np.asarray(self.train, dtype=np.int64)
        self.test = np.asarray(self.test, dtype=np.int64)
        if len(self.labels) != len(self.features):
            raise ValueError("one label per feature row is required")
        if np.intersect1d(self.train, self.test).size:
            raise ValueError("train and test sets overlap")


def split_per_class(labels, per_class, seed):
    """Draw ``per_class`` training indices from every class without replacement.

    Classes with fewer samples contribute all of them. The remaining
    indices form the test set.
    """
    labels = np.asarray(labels)
    rng = make_rng(seed)
    train = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        take = min(per_class, len(members))
        train.append(np.sort(rng.choice(members, size=take, replace=False)))
    train = np.sort(np.concatenate(train))
    test = np.setdiff1d(np.arange(len(labels)), train)
    return train, test


def _sq_distances(x, y, chunk=2048):
    out = np.empty((len(x), len(y)))
    for s in range(0, len(x), chunk):
        d = x[s : s + chunk, None, :] - y[None, :, :]
        out[s : s + chunk] = np.einsum("ijk,ijk->ij", d, d)
    return out


def knn_predict(train_x, train_y, test_x, k):
    """Euclidean k-NN majority vote; ties go to the tied class met first among the neighbours."""
    train_x = np.asarray(train_x, dtype=np.float64)
    test_x = np.asarray(test_x, dtype=np.float64)
    train_y = np.asarray(train_y)
    if len(train_x) == 0:
        raise ValueError("empty training set")
    k = min(int(k), len(train_x))
    d = _sq_distances(test_x, train_x)
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    preds = np.empty(len(test_x), dtype=train_y.dtype)
    for i, row in enumerate(nearest):
        votes = train_y[row]
        classes, counts = np.unique(votes, return_counts=True)
        tied = set(classes[counts == counts.max()].tolist())
        preds[i] = next(v for v in votes if v in tied)
    return preds


def knn_classify(data, k):
    """Share of test pixels whose k-NN prediction matches the label."""
    if len(data.train) == 0:
        raise ValueError("empty training set")
    if len(data.test) == 0:
        raise ValueError("empty test set")
    preds = knn_predict(data.features[data.train], data.labels[data.train], data.features[data.test], k)
    return float(np.mean(preds == data.labels[data.test]))


def hsi_like(shape, n_classes, seed, noise=0.02):
    """Synthetic image stack: vertical class bands with smooth positive spectra plus noise.

    Returns ``(tensor, labels)`` where ``labels`` follows the pixel order of
    the last-mode unfolding (first spatial index fastest).
    """
    h, w, bands = shape
    rng = make_rng(seed)
    grid = np.linspace(0.0, 1.0, bands)
    spectra = []
    # evenly spaced absorption peaks keep the classes apart
    for c in range(n_classes):
        centre = (c + 0.5) / n_classes + rng.uniform(-0.05, 0.05) / n_classes
        width = rng.uniform(0.5, 0.8) / (2 * n_classes)
        spectra.append(0.3 + 0.6 * np.exp(-((grid - centre) ** 2) / (2 * width * width)))
    label_map = np.minimum((np.arange(w) * n_classes) // w, n_classes - 1)
    labels_hw = np.broadcast_to(label_map[None, :], (h, w))
    brightness = rng.uniform(0.8, 1.2, size=(h, w))
    t = np.stack([spectra[c] for c in labels_hw.ravel()]).reshape(h, w, bands)
    t = t * brightness[:, :, None] + noise * rng.standard_normal(t.shape)
    t = np.maximum(t, 0.0)
    labels = labels_hw.reshape(-1, order="F")
    return t, labels

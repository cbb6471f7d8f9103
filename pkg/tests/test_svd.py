import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlrt.svd import gram_eigs, jacobi_eigh, truncated_svd, truncation_residual

from conftest import full_svd_sigmas


def _orthonormality(q):
    return np.max(np.abs(q.T @ q - np.eye(q.shape[1])))


def test_diagonal_rank_one():
    trip = truncated_svd(np.diag([3.0, 1.0]), 1)
    np.testing.assert_allclose(trip.sigmas, [3.0])
    np.testing.assert_allclose(trip.reconstruct(), [[3.0, 0.0], [0.0, 0.0]], atol=1e-14)


def test_rank_one_exact(rng):
    a, b = rng.random(7), rng.random(30)
    mat = np.outer(a, b)
    assert truncation_residual(mat, 1) <= 1e-10 * np.linalg.norm(mat)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_short_fat_against_full_svd(rng, method):
    mat = rng.standard_normal((6, 40))
    trip = truncated_svd(mat, 3, method=method)
    np.testing.assert_allclose(trip.sigmas, full_svd_sigmas(mat)[:3], rtol=1e-8)
    assert _orthonormality(trip.left) <= 1e-10
    assert _orthonormality(trip.right) <= 1e-10
    np.testing.assert_allclose(mat @ trip.right, trip.left * trip.sigmas, atol=1e-10)


def test_tall_matrix_uses_transpose(rng):
    mat = rng.standard_normal((40, 6))
    trip = truncated_svd(mat, 4)
    assert trip.left.shape == (40, 4) and trip.right.shape == (6, 4)
    np.testing.assert_allclose(trip.sigmas, full_svd_sigmas(mat)[:4], rtol=1e-8)
    np.testing.assert_allclose(trip.reconstruct(), truncated_svd(mat.T, 4).reconstruct().T, atol=1e-10)


def test_sign_convention(rng):
    trip = truncated_svd(rng.standard_normal((8, 20)), 5)
    for j in range(5):
        col = trip.left[:, j]
        assert col[np.argmax(np.abs(col))] >= 0


def test_sign_convention_flips_both_sides(rng):
    mat = rng.standard_normal((5, 9))
    t1, t2 = truncated_svd(mat, 3), truncated_svd(-mat, 3)
    # -M has the same left vectors up to the fixed sign, so the right ones flip
    np.testing.assert_allclose(t1.left, t2.left, atol=1e-10)
    np.testing.assert_allclose(t1.right, -t2.right, atol=1e-10)


def test_deficient_completion():
    mat = np.zeros((4, 10))
    mat[0, :] = 1.0
    trip = truncated_svd(mat, 3)
    assert trip.deficient
    np.testing.assert_array_equal(trip.sigmas[1:], 0.0)
    assert _orthonormality(trip.right) <= 1e-10
    assert _orthonormality(trip.left) <= 1e-10
    np.testing.assert_allclose(trip.reconstruct(), mat, atol=1e-12)


def test_zero_matrix():
    trip = truncated_svd(np.zeros((3, 5)), 2)
    assert trip.deficient
    np.testing.assert_array_equal(trip.sigmas, 0.0)
    np.testing.assert_array_equal(trip.reconstruct(), 0.0)


@pytest.mark.parametrize("r", [0, 7])
def test_rank_out_of_range(r):
    with pytest.raises(ValueError, match="outside"):
        truncated_svd(np.ones((3, 6)), r)


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        truncated_svd(np.array([[1.0, np.nan]]), 1)


def test_gram_eigs_trivial():
    w, _ = gram_eigs(np.eye(3))
    np.testing.assert_allclose(w, [1.0, 1.0, 1.0])
    w, _ = gram_eigs(np.zeros((3, 4)))
    np.testing.assert_array_equal(w, 0.0)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_gram_eigs_vs_full_svd(rng, method):
    mat = rng.standard_normal((5, 30))
    w, q = gram_eigs(mat, method=method)
    np.testing.assert_allclose(w, full_svd_sigmas(mat) ** 2, rtol=1e-8)
    assert np.all(np.diff(w) <= 0)
    assert _orthonormality(q) <= 1e-10


def test_gram_eigs_unknown_method():
    with pytest.raises(ValueError, match="eigensolver"):
        gram_eigs(np.eye(2), method="power")


def test_jacobi_matches_lapack(rng):
    b = rng.standard_normal((12, 12))
    g = b + b.T
    wj, vj = jacobi_eigh(g)
    wl, _ = np.linalg.eigh(g)
    np.testing.assert_allclose(wj, wl, atol=1e-10)
    np.testing.assert_allclose(vj @ np.diag(wj) @ vj.T, g, atol=1e-10)


def test_deterministic(rng):
    mat = rng.standard_normal((10, 50))
    a, b = truncated_svd(mat, 4), truncated_svd(mat.copy(), 4)
    assert a.left.tobytes() == b.left.tobytes()
    assert a.sigmas.tobytes() == b.sigmas.tobytes()


@given(
    n=st.integers(1, 8),
    big_n=st.integers(1, 12),
    seed=st.integers(0, 2**32 - 1),
    data=st.data(),
)
@settings(max_examples=80, deadline=None)
def test_eckart_young_property(n, big_n, seed, data):
    r = data.draw(st.integers(1, min(n, big_n)))
    mat = np.random.default_rng(seed).standard_normal((n, big_n))
    sig = full_svd_sigmas(mat)
    expected = np.sqrt(np.sum(sig[r:] ** 2))
    got = truncation_residual(mat, r)
    assert abs(got - expected) <= 1e-8 * max(np.linalg.norm(mat), 1.0)

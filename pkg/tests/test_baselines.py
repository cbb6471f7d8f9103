import itertools

import numpy as np
import pytest

from nlrt import baselines as bl
from nlrt.datagen import make_rng
from nlrt.metrics import rel_error
from nlrt.tensor import fro_norm

NTD = [bl.ntd_mu, bl.ntd_hals]
NCPD = [bl.ncpd_mu, bl.ncpd_hals]


def brute_tucker(core, factors):
    shape = tuple(p.shape[0] for p in factors)
    out = np.zeros(shape)
    for idx in np.ndindex(shape):
        for jdx in np.ndindex(core.shape):
            term = core[jdx]
            for p, i, j in zip(factors, idx, jdx):
                term *= p[i, j]
            out[idx] += term
    return out


def test_reconstruct_tucker_identity(rng):
    core = rng.random((3, 3, 3))
    out = bl.reconstruct_tucker(bl.TuckerFactors(core, [np.eye(3)] * 3))
    np.testing.assert_array_equal(out, core)


def test_reconstruct_tucker_ones():
    out = bl.reconstruct_tucker(bl.TuckerFactors(np.ones((2, 3)), [np.ones((4, 2)), np.ones((5, 3))]))
    np.testing.assert_array_equal(out, np.full((4, 5), 6.0))


def test_reconstruct_tucker_brute(rng):
    core = rng.random((2, 3, 2))
    factors = [rng.random((3, 2)), rng.random((4, 3)), rng.random((2, 2))]
    out = bl.reconstruct_tucker(bl.TuckerFactors(core, factors))
    np.testing.assert_allclose(out, brute_tucker(core, factors), atol=1e-10)


def test_reconstruct_cp_brute(rng):
    w = rng.random(4)
    factors = [rng.random((3, 4)), rng.random((5, 4)), rng.random((2, 4))]
    ref = sum(w[z] * np.multiply.outer(np.multiply.outer(factors[0][:, z], factors[1][:, z]), factors[2][:, z])
              for z in range(4))
    np.testing.assert_allclose(bl.reconstruct_cp(bl.CpFactors(w, factors)), ref, atol=1e-10)


def test_khatri_rao_order(rng):
    a, b = rng.random((3, 2)), rng.random((4, 2))
    kr = bl.khatri_rao([a, b])
    for i, j in itertools.product(range(3), range(4)):
        np.testing.assert_allclose(kr[i + 3 * j], a[i] * b[j])


def test_normalize_cp_preserves_tensor(rng):
    f = bl.CpFactors(rng.random(3), [rng.random((4, 3)), rng.random((5, 3))])
    g = bl.normalize_cp(f)
    np.testing.assert_allclose(bl.reconstruct_cp(g), bl.reconstruct_cp(f), atol=1e-12)
    for p in g.factors:
        np.testing.assert_allclose(np.linalg.norm(p, axis=0), 1.0)


def test_cp_rank_candidates():
    assert bl.cp_rank_candidates((5, 5, 5)) == [125, 15, 5]
    assert bl.cp_rank_candidates((1, 1)) == [2, 1]


def _rank_one(shape, seed):
    rng = make_rng(seed)
    vecs = [rng.random(n) + 0.1 for n in shape]
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return out


@pytest.mark.parametrize("fit", NTD)
def test_ntd_rank_one_exact(fit):
    a = _rank_one((6, 7, 8), seed=1)
    f, tr = fit(a, (1, 1, 1), bl.FitConfig(tol=1e-12, max_iters=2000))
    assert rel_error(bl.reconstruct_tucker(f), a) <= 1e-6


@pytest.mark.parametrize("fit", NCPD)
def test_ncpd_rank_one_exact(fit):
    a = _rank_one((6, 7, 8), seed=2)
    f, tr = fit(a, 1, bl.FitConfig(tol=1e-12, max_iters=2000))
    assert rel_error(bl.reconstruct_cp(f), a) <= 1e-6


@pytest.mark.parametrize("fit", NTD)
def test_ntd_self_reconstruction(fit):
    rng = make_rng(5)
    target = bl.TuckerFactors(rng.random((2, 2, 2)), [rng.random((n, 2)) for n in (8, 9, 10)])
    a = bl.reconstruct_tucker(target)
    # best of 10 starts <= 1e-2, stopping at the first start that gets there
    assert any(
        rel_error(bl.reconstruct_tucker(fit(a, (2, 2, 2), bl.FitConfig(tol=1e-8, max_iters=3000, seed=s))[0]), a) <= 1e-2
        for s in range(10)
    )


@pytest.mark.parametrize("fit", NCPD)
def test_ncpd_self_reconstruction(fit):
    rng = make_rng(6)
    target = bl.CpFactors(np.ones(5), [rng.random((n, 5)) for n in (8, 9, 10)])
    a = bl.reconstruct_cp(target)
    # best of 10 starts <= 1e-2, stopping at the first start that gets there
    assert any(
        rel_error(bl.reconstruct_cp(fit(a, 5, bl.FitConfig(tol=1e-8, max_iters=3000, seed=s))[0]), a) <= 1e-2
        for s in range(10)
    )


@pytest.mark.parametrize("fit", NTD + NCPD)
def test_objective_nonincreasing_and_factors_nonneg(fit):
    a = make_rng(8).random((7, 8, 9))
    rank = (2, 2, 2) if fit in NTD else 3
    f, tr = fit(a, rank, bl.FitConfig(tol=1e-7, max_iters=200, seed=3))
    obj = np.asarray(tr.objective)
    assert np.all(np.diff(obj) <= 1e-9 * obj[0])
    assert all(np.all(p >= 0) for p in f.factors)
    est = bl.reconstruct_tucker(f) if fit in NTD else bl.reconstruct_cp(f)
    assert obj[-1] == pytest.approx(fro_norm(a - est), rel=1e-8)
    assert len(tr.rel_change) == tr.iterations + 1


@pytest.mark.parametrize("fit", NTD + NCPD)
def test_deterministic_given_seed(fit):
    a = make_rng(9).random((5, 6, 7))
    rank = (2, 2, 2) if fit in NTD else 3
    f1, _ = fit(a, rank, bl.FitConfig(max_iters=50, seed=4))
    f2, _ = fit(a, rank, bl.FitConfig(max_iters=50, seed=4))
    assert all(p.tobytes() == q.tobytes() for p, q in zip(f1.factors, f2.factors))


@pytest.mark.parametrize("fit", NTD + NCPD)
def test_rejects_negative_input(fit):
    rank = (1, 1) if fit in NTD else 1
    with pytest.raises(ValueError, match="nonnegative"):
        fit(-np.ones((3, 3)), rank)


def test_cp_rank_validation():
    with pytest.raises(ValueError):
        bl.ncpd_mu(np.ones((3, 3)), 0)

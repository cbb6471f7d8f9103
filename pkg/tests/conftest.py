import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_unfold(t, k):
    """Index-map enumerator: column index of (i_{k+1}, ..., i_{k-1}) with the first listed mode fastest."""
    m = t.ndim
    others = [(k + j) % m for j in range(1, m)]
    n_cols = int(np.prod([t.shape[i] for i in others]))
    out = np.zeros((t.shape[k], n_cols))
    for idx in itertools.product(*[range(n) for n in t.shape]):
        col, stride = 0, 1
        for i in others:
            col += idx[i] * stride
            stride *= t.shape[i]
        out[idx[k], col] = t[idx]
    return out


def full_svd_sigmas(mat):
    """Singular values from an independent full decomposition (LAPACK gesdd)."""
    return np.linalg.svd(np.asarray(mat), compute_uv=False)


_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record (and print) one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash[_LINES]

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)

"""Independent reference implementations used as test oracles.

None of these call into the package; they are deliberately naive so that
agreement with the library is meaningful.
"""
from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate


def jacobi_eigenvalues(A, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1)) if theta != 0 else 1.0
                c = 1 / np.sqrt(t**2 + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q], J[q, p] = s, -s
                A = J.T @ A @ J
    else:
        raise RuntimeError("Jacobi oracle did not converge")
    return np.sort(np.diag(A))[::-1]


def toeplitz_double_loop(h_of_lag, n):
    """Materialize ``T[m, k] = h(m - k)`` entry by entry."""
    T = np.empty((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            T[m, k] = h_of_lag(m - k)
    return T


def quad_band_kernel(W, m):
    """``integral_{-W}^{W} exp(j 2 pi f m) df`` by adaptive quadrature."""
    re, _ = integrate.quad(lambda f: np.cos(2 * np.pi * f * m), -W, W, epsabs=1e-14, epsrel=1e-14, limit=200)
    im, _ = integrate.quad(lambda f: np.sin(2 * np.pi * f * m), -W, W, epsabs=1e-14, epsrel=1e-14, limit=200)
    return re + 1j * im


def random_hermitian_impulse(rng, n):
    """Centered Hermitian impulse response of length ``2n - 1``."""
    pos = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    pos[0] = pos[0].real
    return np.concatenate([np.conj(pos[:0:-1]), pos])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_lines(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in lines:
            terminalreporter.write_line(text)

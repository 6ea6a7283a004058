"""FFT Toeplitz products, truncated pseudoinverse solves and multitaper spectra."""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, ParameterError, RankError
from .spectral import dpss_basis

__all__ = [
    "SolveReport",
    "embedding_size",
    "toeplitz_matvec",
    "default_rank",
    "truncated_pinv_solve",
    "multitaper_psd",
    "periodogram",
]

RANK_FLOOR = 1e-12


def embedding_size(n):
    """Smallest power of two that is at least ``2n - 1``."""
    return 1 << max(0, (2 * n - 2).bit_length())


@functools.lru_cache(maxsize=32)
def _embedded_spectrum(op, real):
    """DFT of the circulant of size :func:`embedding_size` that contains ``op``.

    Cached per operator; ``real`` selects the half spectrum of a real
    symmetric operator.
    """
    col = op.first_column
    n = col.size
    L = embedding_size(n)
    # circulant first column: h[0..n-1], zeros, h[-(n-1)..-1]
    c = np.zeros(L, dtype=col.dtype)
    c[:n] = col
    c[L - n + 1 :] = np.conj(col[:0:-1])
    spec = np.fft.rfft(c).real if real else np.fft.fft(c)
    spec.setflags(write=False)
    return spec


def _matvec_1d(op, x):
    n = op.first_column.size
    L = embedding_size(n)
    pad = (...,) + (None,) * (x.ndim - 1)
    if op.is_real and not np.iscomplexobj(x):
        spec = _embedded_spectrum(op, True)[pad]
        return np.fft.irfft(np.fft.rfft(x, n=L, axis=0) * spec, n=L, axis=0)[:n]
    spec = _embedded_spectrum(op, False)[pad]
    return np.fft.ifft(np.fft.fft(x, n=L, axis=0) * spec, axis=0)[:n]


def toeplitz_matvec(op, x):
    """``T @ x`` in ``O(n log n)`` through circulant embedding.

    ``x`` may be a vector or an ``(n, k)`` matrix of column vectors. Real
    operators applied to real input return real output.
    """
    x = np.asarray(x)
    if x.shape[0] != op.n or x.ndim not in (1, 2):
        raise DimensionError(f"operand of shape {x.shape} does not match operator dimension {op.n}")
    real = op.is_real and not np.iscomplexobj(x)
    if op.separable:
        a, b = op.factors
        X = x.reshape(a.n, b.n, -1)
        Y = _matvec_1d(a, X)
        Y = np.moveaxis(_matvec_1d(b, np.moveaxis(Y, 1, 0)), 0, 1)
        y = Y.reshape(x.shape)
    else:
        y = _matvec_1d(op, x)
    return y.real if real else y


@dataclass
class SolveReport:
    solution: np.ndarray
    rank_used: int
    residual: float
    dropped_mass: float

    def to_dict(self):
        sol = np.asarray(self.solution)
        return {
            "solution": [[float(v.real), float(v.imag)] for v in sol.astype(np.complex128)],
            "rank_used": self.rank_used,
            "residual": self.residual,
            "dropped_mass": self.dropped_mass,
        }


def default_rank(dec):
    """``ceil(|A||B|)``, the time-frequency area, read off the eigenvalue sum."""
    return int(math.ceil(round(float(np.sum(dec.eigenvalues)), 9)))


def truncated_pinv_solve(dec, y, K=None, op=None):
    """Solve ``y = T x`` with the rank-``K`` pseudoinverse of ``T``.

    ``x = sum_{l<K} <u_l, y> / lambda_l u_l``. The residual
    ``||T x - y|| / ||y||`` is computed with ``op`` when given, otherwise from
    the (complete) decomposition itself.
    """
    y = np.asarray(y)
    if y.shape != (dec.dimension,):
        raise DimensionError(f"right-hand side of shape {y.shape} does not match dimension {dec.dimension}")
    K = default_rank(dec) if K is None else int(K)
    if not 0 < K <= len(dec):
        raise ParameterError(f"rank K must lie in [1, {len(dec)}], got {K}")
    lam = dec.eigenvalues
    if lam[K - 1] <= RANK_FLOOR:
        raise RankError(f"lambda_{K - 1} = {lam[K - 1]:.3e} is numerically zero; use a smaller rank")
    U = dec.eigenvectors[:, :K]
    x = U @ ((U.conj().T @ y) / lam[:K])
    if op is not None:
        Tx = toeplitz_matvec(op, x)
    elif dec.is_complete:
        V = dec.eigenvectors
        Tx = V @ (lam * (V.conj().T @ x))
    else:
        raise ParameterError("a partial decomposition needs the operator to report a residual")
    if not np.iscomplexobj(y) and not np.iscomplexobj(dec.eigenvectors):
        x, Tx = x.real, Tx.real
    ynorm = np.linalg.norm(y)
    residual = float(np.linalg.norm(Tx - y) / ynorm) if ynorm > 0 else float(np.linalg.norm(Tx))
    dropped = float(np.sum(lam[K:]))
    return SolveReport(x, K, residual, dropped)


def periodogram(signal, f_grid=None):
    """``|sum_n x[n] exp(-j 2 pi f_m n)|^2 / N`` on ``f_m = m / f_grid``."""
    x = np.asarray(signal)
    N = x.shape[-1]
    f_grid = N if f_grid is None else f_grid
    return np.abs(np.fft.fft(x, n=f_grid, axis=-1)) ** 2 / N


def multitaper_psd(signal, W, K, f_grid=None, weighted=False, tapers=None):
    """Thomson multitaper spectrum estimate on ``f_m = m / f_grid``.

    ``S(f) = (1/K) sum_{k<K} |sum_n x[n] u_k[n] exp(-j 2 pi f n)|^2`` with the
    first ``K`` DPSS vectors ``u_k`` for half-bandwidth ``W``. With
    ``weighted=True`` the tapered spectra are averaged with weights
    proportional to the DPSS eigenvalues instead.

    ``signal`` may be a single sequence or a 2-D array of sequences (rows).
    """
    x = np.asarray(signal)
    N = x.shape[-1]
    f_grid = N if f_grid is None else f_grid
    if K < 1 or K > N:
        raise ParameterError(f"number of tapers K must lie in [1, N={N}], got {K}")
    if f_grid < N:
        raise ParameterError(f"f_grid must be at least N={N}, got {f_grid}")
    if K > math.ceil(2 * N * W):
        warnings.warn(
            f"K={K} tapers exceeds ceil(2NW)={math.ceil(2 * N * W)}; trailing tapers leak",
            stacklevel=2,
        )
    if tapers is None:
        tapers = dpss_basis(N, W, K, method="tridiagonal")
    U = tapers.eigenvectors[:, :K]
    spectra = np.abs(np.fft.fft(x[..., None, :] * U.T, n=f_grid, axis=-1)) ** 2
    if weighted:
        w = np.asarray(tapers.eigenvalues[:K], dtype=float)
        w = w / w.sum()
    else:
        w = np.full(K, 1.0 / K)
    return np.tensordot(w, np.moveaxis(spectra, -2, 0), axes=1)

"""Eigendecompositions, eigenvalue counting and distribution diagnostics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from .exceptions import DomainError, NumericError, ParameterError, ValidationError
from .operators import ToeplitzOperator, prolate_operator
from .groups import check_bandwidth

__all__ = [
    "EigenDecomposition",
    "DistributionReport",
    "SzegoRow",
    "WrapOverlapWarning",
    "eig_hermitian",
    "dpss_basis",
    "dpss_tridiagonal",
    "eig_count",
    "transition_bound_dpss",
    "szego_report",
    "cdf_distance",
    "estimate_eigs_symbol_sampling",
    "estimate_eigs_circulant",
    "canonicalize_phase",
    "THETAS",
]

_TIE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenpairs sorted by descending eigenvalue.

    ``eigenvectors[:, l]`` is the unit eigenvector for ``eigenvalues[l]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str = ""

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.eigenvectors)
        if vecs.ndim != 2 or vecs.shape[1] != vals.size:
            raise ValidationError("eigenvectors must be an (n, k) array matching the eigenvalues")
        if np.any(np.diff(vals) > 0):
            raise ValidationError("eigenvalues must be sorted in descending order")
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    def __len__(self):
        return self.eigenvalues.size

    @property
    def dimension(self):
        """Dimension of the ambient space (rows of the eigenvector matrix)."""
        return self.eigenvectors.shape[0]

    @property
    def is_complete(self):
        return len(self) == self.dimension

    def prefix(self, count):
        if not 0 <= count <= len(self):
            raise ParameterError(f"count must lie in [0, {len(self)}], got {count}")
        return EigenDecomposition(
            self.eigenvalues[:count], self.eigenvectors[:, :count], self.source
        )


def canonicalize_phase(vectors):
    """Rotate each column so its largest-magnitude entry is real and positive.

    Entries within a relative ``1e-9`` of the maximum count as ties; the
    first one wins, which keeps symmetric and antisymmetric vectors stable.
    """
    vectors = np.array(vectors, copy=True)
    if vectors.size == 0:
        return vectors
    mags = np.abs(vectors)
    peak = mags.max(axis=0)
    idx = np.argmax(mags >= peak * (1 - _TIE_RTOL), axis=0)
    pivot = vectors[idx, np.arange(vectors.shape[1])]
    scale = np.conj(pivot) / np.abs(pivot)
    vectors *= scale if np.iscomplexobj(vectors) else np.sign(scale.real)
    return vectors


def _sorted_desc(vals, vecs):
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def eig_hermitian(op: ToeplitzOperator) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian Toeplitz operator.

    Separable 2-D operators are decomposed factor by factor; their spectrum
    is the set of pairwise products and the eigenvectors are Kronecker
    products.
    """
    if op.separable:
        a, b = (eig_hermitian(f) for f in op.factors)
        vals = np.multiply.outer(a.eigenvalues, b.eigenvalues).ravel()
        vecs = np.einsum("ik,jl->ijkl", a.eigenvectors, b.eigenvectors).reshape(op.n, op.n)
        vals, vecs = _sorted_desc(vals, vecs)
        return EigenDecomposition(vals, canonicalize_phase(vecs), op.symbol_tag)
    try:
        vals, vecs = scipy.linalg.eigh(op.to_dense(), driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"Hermitian eigensolver failed for n={op.n}: {exc}") from exc
    vals, vecs = _sorted_desc(vals, vecs)
    return EigenDecomposition(vals, canonicalize_phase(vecs), op.symbol_tag)


def dpss_tridiagonal(N, W):
    """Diagonal and off-diagonal of the symmetric tridiagonal matrix that
    commutes with the ``N x N`` prolate matrix."""
    n = np.arange(N, dtype=np.float64)
    diag = ((N - 1 - 2 * n) / 2.0) ** 2 * np.cos(2 * np.pi * W)
    off = n[1:] * (N - n[1:]) / 2.0
    return diag, off


def band_energy(vectors, W, nodes=None):
    """In-band spectral energy ``integral_{-W}^{W} |sum_n u[n] exp(-j 2 pi f n)|^2 df``
    of each column ``u``.

    For a unit vector this is its Rayleigh quotient with the prolate matrix,
    but computed without cancellation, so it keeps full relative accuracy for
    eigenvalues far below machine epsilon. Gauss-Legendre with ``nodes``
    points (default ``2N + 32``).
    """
    vectors = np.asarray(vectors)
    N = vectors.shape[0]
    x, w = scipy.special.roots_legendre(nodes or 2 * N + 32)
    F = np.exp(-2j * np.pi * np.mod(np.outer(W * x, np.arange(N)), 1.0))
    return W * (w @ np.abs(F @ vectors) ** 2)


def dpss_basis(N, W, count=None, method="dense"):
    """Leading ``count`` DPSS eigenpairs of the prolate matrix ``B_{N,W}``.

    Parameters
    ----------
    N : int
    W : float
        Half-bandwidth in ``(0, 1/2]``.
    count : int, optional
        Number of eigenpairs to return; all ``N`` by default.
    method : {"dense", "tridiagonal"}
        ``"dense"`` diagonalizes the prolate matrix directly. ``"tridiagonal"``
        takes the eigenvectors of the commuting tridiagonal matrix, which are
        well conditioned even where the prolate eigenvalues cluster at 1 or 0,
        and recovers the eigenvalues as Rayleigh quotients; those below
        ``1e-6`` are recomputed by :func:`band_energy`, which resolves them
        to full relative precision.

    Returns
    -------
    EigenDecomposition
    """
    check_bandwidth(W)
    op = prolate_operator(N, W)
    count = N if count is None else count
    if not 0 <= count <= N:
        raise ParameterError(f"count must lie in [0, N={N}], got {count}")
    if method == "dense":
        return eig_hermitian(op).prefix(count)
    if method != "tridiagonal":
        raise ParameterError(f"unknown DPSS method {method!r}")
    if count == 0:
        return EigenDecomposition(np.empty(0), np.empty((N, 0)), op.symbol_tag)
    diag, off = dpss_tridiagonal(N, W)
    try:
        _, vecs = scipy.linalg.eigh_tridiagonal(
            diag, off, select="i", select_range=(N - count, N - 1)
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"tridiagonal eigensolver failed for N={N}: {exc}") from exc
    vecs = vecs[:, ::-1]
    B = op.to_dense()
    vals = np.einsum("ij,ij->j", vecs, B @ vecs)
    small = vals < 1e-6
    if np.any(small):
        vals[small] = band_energy(vecs[:, small], W)
    # eigenvalues below rounding level may come out a hair out of order
    vals = np.minimum.accumulate(vals)
    return EigenDecomposition(vals, canonicalize_phase(vecs), op.symbol_tag)


def eig_count(dec, a, b, closed=False):
    """Number of eigenvalues in ``(a, b)``, or in ``[a, b]`` when ``closed``."""
    lam = dec.eigenvalues if isinstance(dec, EigenDecomposition) else np.asarray(dec)
    if closed:
        return int(np.count_nonzero((lam >= a) & (lam <= b)))
    return int(np.count_nonzero((lam > a) & (lam < b)))


def transition_bound_dpss(N, eps):
    """Upper bound on the number of DPSS eigenvalues in ``(eps, 1 - eps)``:
    ``(8/pi^2 log(8N) + 12) log(15/eps)``."""
    if not 0 < eps < 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2), got {eps!r}")
    if N < 2:
        raise ParameterError(f"N must be at least 2, got {N!r}")
    return (8.0 / math.pi**2 * math.log(8 * N) + 12.0) * math.log(15.0 / eps)


# -- Szego-type diagnostics --------------------------------------------------

def _log(x):
    return np.log(x)


THETAS = {
    "identity": lambda x: x,
    "square": lambda x: x**2,
    "log": _log,
}


@dataclass(frozen=True)
class SzegoRow:
    theta: str
    matrix_mean: float
    symbol_integral: float

    @property
    def abs_gap(self):
        return abs(self.matrix_mean - self.symbol_integral)

    def to_dict(self):
        return {
            "theta": self.theta,
            "matrix_mean": self.matrix_mean,
            "symbol_integral": self.symbol_integral,
            "abs_gap": self.abs_gap,
        }


@dataclass
class DistributionReport:
    n: int
    szego_rows: list = field(default_factory=list)
    cdf_distance: float = float("nan")
    counts: dict = field(default_factory=dict)
    estimator_errors: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "n": self.n,
            "rows": [r.to_dict() for r in self.szego_rows],
            "cdf_distance": self.cdf_distance,
            "counts": {f"({a!r},{b!r})": c for (a, b), c in self.counts.items()},
            "estimator_errors": dict(self.estimator_errors),
        }


def _apply_theta(name, theta, values, what):
    with np.errstate(all="ignore"):
        out = np.asarray(theta(values))
    bad = ~np.isfinite(out)
    if np.any(bad):
        offender = np.asarray(values)[np.argmax(bad)]
        raise DomainError(f"test function {name!r} is undefined at {what} {offender!r}")
    return out


def _atoms(samples, atom_fraction):
    values, counts = np.unique(samples, return_counts=True)
    return values[counts >= atom_fraction * samples.size]


def cdf_distance(eigenvalues, symbol_samples, atom_fraction=1e-3):
    """Sup-norm distance between the empirical CDF of the eigenvalues and the
    distribution function of the symbol (uniform measure on the grid).

    Points carrying an atom of the symbol distribution (a value taken on at
    least ``atom_fraction`` of the grid) are excluded, as are points within
    ``1e-9`` of them.
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    sym = np.sort(np.asarray(symbol_samples, dtype=float))
    atoms = _atoms(sym, atom_fraction)
    x = np.unique(np.concatenate([lam, sym]))
    if atoms.size:
        near = np.min(np.abs(x[:, None] - atoms[None, :]), axis=1) <= 1e-9
        x = x[~near]
    if x.size == 0:
        return 0.0
    right = np.abs(
        np.searchsorted(lam, x, "right") / lam.size - np.searchsorted(sym, x, "right") / sym.size
    )
    left = np.abs(
        np.searchsorted(lam, x, "left") / lam.size - np.searchsorted(sym, x, "left") / sym.size
    )
    return float(max(right.max(), left.max()))


def szego_report(dec, symbol, thetas=("identity", "square")):
    """Compare eigenvalue averages with symbol averages.

    For each test function ``theta`` the report holds the matrix mean
    ``(1/n) sum theta(lambda_l)`` and the symbol integral
    ``integral_0^1 theta(symbol(f)) df`` (grid average), plus the CDF
    distance between the two distributions.

    ``thetas`` may mix names from :data:`THETAS` and ``(name, callable)`` pairs.
    """
    if not symbol.real_flag:
        raise ValidationError("Szego comparisons need a real-valued symbol")
    lam = dec.eigenvalues
    report = DistributionReport(n=len(lam))
    for item in thetas:
        name, theta = (item, THETAS[item]) if isinstance(item, str) else item
        lhs = _apply_theta(name, theta, lam, "eigenvalue")
        rhs = _apply_theta(name, theta, symbol.samples, "symbol value")
        report.szego_rows.append(SzegoRow(name, float(np.mean(lhs)), float(np.mean(rhs))))
    report.cdf_distance = cdf_distance(lam, symbol.samples)
    return report


# -- individual eigenvalue estimates -----------------------------------------

def estimate_eigs_symbol_sampling(symbol, n):
    """Estimates ``symbol(l/n)``, ``l = 0..n-1``, sorted in descending order.

    Trigonometric-polynomial symbols are evaluated exactly through the DFT
    of their ``n``-periodized coefficients; other symbols use the closed form
    or the sample grid.
    """
    if not symbol.real_flag:
        raise ValidationError("symbol sampling needs a real-valued symbol")
    if symbol.coefficients is not None:
        periodized = np.zeros(n, dtype=np.complex128)
        for k, v in symbol.coefficients.items():
            periodized[k % n] += v
        values = np.fft.fft(periodized).real
    elif symbol.func is None and symbol.grid_size % n == 0:
        values = symbol.samples[:: symbol.grid_size // n]
    else:
        values = np.real(symbol(np.arange(n) / n))
    return np.sort(values)[::-1]


class WrapOverlapWarning(UserWarning):
    """The impulse response is too wide for a clean circulant wrap."""


def bandwidth(op):
    """Largest lag ``k`` with ``h[k] != 0``."""
    nz = np.flatnonzero(op.first_column)
    return int(nz[-1]) if nz.size else 0


def estimate_eigs_circulant(op):
    """Eigenvalue estimates from the circulant that wraps ``h`` modulo ``n``.

    The circulant has first column ``c[0] = h[0]``,
    ``c[k] = h[k] + conj(h[n-k])`` and its eigenvalues are the DFT of ``c``.
    Issues :class:`WrapOverlapWarning` when the bandwidth of ``h`` is at
    least ``n/2``.
    """
    op._require_1d()
    h = op.first_column.astype(np.complex128)
    n = h.size
    if 2 * bandwidth(op) >= n and n > 1:
        warnings.warn(
            f"bandwidth {bandwidth(op)} >= n/2 = {n / 2}: wrapped lags overlap",
            WrapOverlapWarning,
            stacklevel=2,
        )
    c = h.copy()
    c[1:] = h[1:] + np.conj(h[:0:-1])
    return np.sort(np.fft.fft(c).real)[::-1]

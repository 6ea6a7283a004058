"""n-widths, effective dimensionality and subspace-approximation guarantees.

All quantities derive from the eigenpairs of a time-frequency limiting
operator (or of the Gram operator of a pulse), whose leading eigenvectors
span the optimal approximation subspaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.special

from .exceptions import ConfigurationError, HypothesisError, NumericError, ParameterError
from .groups import BandKind, BandSpec
from .operators import ToeplitzOperator, autocorrelation_operator
from .spectral import EigenDecomposition, dpss_basis, eig_hermitian

__all__ = [
    "SlepianBasis",
    "DofReport",
    "DofStudy",
    "SinusoidK",
    "n_width",
    "n_widths",
    "effective_dimension",
    "dof_report",
    "dof_convergence_study",
    "character_approx_mse",
    "character_residuals",
    "random_residual",
    "random_residual_mc",
    "uniform_sinusoid_K",
]

NEGATIVE_TOL = 1e-10
DEFAULT_SEED = 20170301


@dataclass(frozen=True, eq=False)
class SlepianBasis:
    """The first ``n`` eigenvectors of a time-frequency limiting operator."""

    vectors: np.ndarray
    eigenvalues: np.ndarray
    op: ToeplitzOperator | None = None

    @classmethod
    def from_decomposition(cls, dec, n, op=None):
        pre = dec.prefix(n)
        return cls(pre.eigenvectors, pre.eigenvalues, op)

    @property
    def n(self):
        return self.vectors.shape[1]

    @property
    def dimension(self):
        return self.vectors.shape[0]

    def project(self, x):
        """Orthogonal projection of the columns of ``x`` onto the span."""
        U = self.vectors
        return U @ (U.conj().T @ x)

    def projector(self):
        U = self.vectors
        return U @ U.conj().T


def n_width(dec, n):
    """Kolmogorov n-width ``sqrt(lambda_n)`` (0-based ``n``)."""
    lam = dec.eigenvalues
    if not 0 <= n < lam.size:
        raise IndexError(f"n-width index {n} outside [0, {lam.size})")
    value = lam[n]
    if value < -NEGATIVE_TOL:
        raise NumericError(f"eigenvalue lambda_{n} = {value!r} is negative beyond tolerance")
    return math.sqrt(max(value, 0.0))


def n_widths(dec):
    lam = np.asarray(dec.eigenvalues)
    if np.any(lam < -NEGATIVE_TOL):
        raise NumericError(f"negative eigenvalue {lam.min()!r} in a Gram operator")
    return np.sqrt(np.clip(lam, 0.0, None))


def effective_dimension(dec, eps):
    """Smallest ``n`` with ``d_n < eps``; the dimension if there is none."""
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps!r}")
    d = n_widths(dec)
    below = np.flatnonzero(d < eps)
    return int(below[0]) if below.size else int(d.size)


@dataclass
class DofReport:
    n_widths: np.ndarray
    eff_dim: dict = field(default_factory=dict)
    limit_target: dict = field(default_factory=dict)


def dof_report(dec, eps_values, pulse_symbol=None):
    """n-widths plus effective dimension at several levels.

    With ``pulse_symbol`` the asymptotic density ``nu{|phi| > eps}`` is
    included for each level.
    """
    report = DofReport(n_widths(dec))
    for eps in eps_values:
        report.eff_dim[eps] = effective_dimension(dec, eps)
        if pulse_symbol is not None:
            report.limit_target[eps] = float(np.mean(np.abs(pulse_symbol.samples) > eps))
    return report


@dataclass
class DofStudy:
    eps: float
    limit: float
    rows: list  # (N, effective dimension, ratio)

    @property
    def ratios(self):
        return np.array([r[2] for r in self.rows])


def dof_convergence_study(pulse_symbol, eps, sizes, level_fraction=1e-3):
    """Effective dimension per window size for the shifts of a pulse.

    Returns the ratio ``N(W, eps) / N`` for each size together with its limit
    ``nu{|phi| > eps}`` measured on the symbol grid. A level ``eps`` that
    ``|phi|`` takes on a set of positive measure (at least ``level_fraction``
    of the grid) violates the hypothesis of the limit theorem.
    """
    mag = np.abs(pulse_symbol.samples)
    flat = np.isclose(mag, eps, rtol=0.0, atol=1e-12)
    if np.mean(flat) >= level_fraction:
        raise HypothesisError(
            f"|phi| equals eps={eps!r} on {np.mean(flat):.3%} of the grid; the limit is undefined"
        )
    limit = float(np.mean(mag > eps))
    rows = []
    for N in sizes:
        dec = eig_hermitian(autocorrelation_operator(pulse_symbol, N))
        k = effective_dimension(dec, eps)
        rows.append((int(N), k, k / N))
    return DofStudy(eps, limit, rows)


# -- character approximation ---------------------------------------------------

def _check_basis_band(basis, band):
    op = basis.op
    if op is None or op.band is None:
        raise ConfigurationError("basis does not come from a time-frequency limiting operator")
    if op.band != band:
        raise ConfigurationError(f"basis was built for {op.band}, not {band}")
    if op.n != basis.dimension:
        raise ConfigurationError("basis dimension does not match its operator")


def _characters(freqs, N):
    """Columns ``exp(j 2 pi f n)``, ``n = 0..N-1``, one per frequency."""
    n = np.arange(N)
    return np.exp(2j * np.pi * np.mod(np.outer(n, freqs), 1.0))


def character_residuals(basis, freqs, chunk=4096):
    """Normalized residuals ``||e_f - P e_f||^2 / ||e_f||^2`` for 1-D frequencies."""
    U = basis.vectors
    N = basis.dimension
    out = np.empty(len(freqs))
    for s in range(0, len(freqs), chunk):
        E = _characters(freqs[s : s + chunk], N)
        energy = np.sum(np.abs(U.conj().T @ E) ** 2, axis=0) if basis.n else 0.0
        out[s : s + chunk] = 1.0 - energy / N
    return out


def character_approx_mse(basis, band, grid_size=None):
    """Band-averaged normalized residual of time-limited characters.

    Computes ``(1/|B|) integral_B ||chi - P chi||^2 / ||chi||^2`` by
    quadrature. The circle band uses Gauss-Legendre nodes on ``[-W, W]``
    (``grid_size`` of them, at least ``16 N``); a DFT index block is an exact
    finite sum; a product band uses a tensor Gauss grid with ``grid_size``
    nodes per axis.
    """
    _check_basis_band(basis, band)
    N = basis.dimension
    if band.kind is BandKind.INDEX_BLOCK:
        k = band.start + np.arange(band.count)
        return float(np.mean(character_residuals(basis, k / band.modulus)))
    if band.kind is BandKind.SYMMETRIC:
        grid_size = 16 * N if grid_size is None else grid_size
        if grid_size < 16 * N:
            raise ParameterError(f"grid_size must be at least 16 N = {16 * N}")
        W = band.widths[0]
        x, w = scipy.special.roots_legendre(grid_size)
        res = character_residuals(basis, W * x)
        return float(np.dot(w, res) / 2.0)
    # product band: grid_size counts nodes per axis
    n1, n2 = basis.op.shape
    m = 16 * max(n1, n2) if grid_size is None else grid_size
    if m < 16 * max(n1, n2):
        raise ParameterError(f"grid_size must be at least 16 max(N1, N2) = {16 * max(n1, n2)} per axis")
    W1, W2 = band.widths
    x, w = scipy.special.roots_legendre(m)
    f1, f2 = W1 * x, W2 * x
    E1 = _characters(f1, n1)
    E2 = _characters(f2, n2)
    U = basis.vectors.reshape(n1, n2, basis.n)
    # coefficients <u_l, e_{f1} (x) e_{f2}> for all node pairs
    C = np.einsum("abl,ai,bj->lij", U.conj(), E1, E2)
    res = 1.0 - np.sum(np.abs(C) ** 2, axis=0) / (n1 * n2)
    return float(w @ res @ w / 4.0)


def random_residual(dec, n, domain_size, band_measure):
    """``1 - sum_{l<n} lambda_l / (|A| |B|)``: expected normalized residual of
    a random character (uniform on the band) or of a band-limited white
    process, projected on the first ``n`` eigenvectors.

    When ``dec`` is complete and its eigenvalues sum to ``|A| |B|`` (as they
    do for a time-frequency limiting operator), the value is evaluated as the
    tail sum ``sum_{l>=n} lambda_l / (|A| |B|)``, which keeps its relative
    accuracy when the residual is far below machine epsilon.
    """
    if not 0 <= n <= len(dec):
        raise ParameterError(f"n must lie in [0, {len(dec)}], got {n}")
    area = domain_size * band_measure
    lam = dec.eigenvalues
    if dec.is_complete and abs(math.fsum(lam) - area) <= 1e-8 * area:
        return math.fsum(lam[n:]) / area
    return 1.0 - math.fsum(lam[:n]) / area


def random_residual_mc(dec, n, band, draws=100_000, seed=DEFAULT_SEED, process="character"):
    """Monte-Carlo estimate of the expected normalized residual.

    ``process="character"`` draws a single character with frequency uniform
    on the band. ``process="wss"`` draws a stationary process with flat power
    spectrum on the band as a random superposition of 32 such characters with
    complex Gaussian amplitudes; its covariance is the same band-limiting
    kernel.

    Returns ``(mean, standard_error, seed)``. The mean is a ratio of
    expectations, so for ``"wss"`` the standard error is a delta-method value.
    """
    N = dec.dimension
    # with a complete basis the residual is the energy in the discarded
    # directions, which avoids cancelling two nearly equal totals
    tail = dec.is_complete
    U = dec.eigenvectors[:, n:] if tail else dec.eigenvectors[:, :n]
    rng = np.random.default_rng(seed)

    def draw(size):
        if band.kind is BandKind.SYMMETRIC:
            return rng.uniform(-band.widths[0], band.widths[0], size)
        if band.kind is BandKind.INDEX_BLOCK:
            return (band.start + rng.integers(0, band.count, size)) / band.modulus
        raise ConfigurationError("Monte-Carlo residuals support 1-D bands only")

    chunk = 8192
    num, den = [], []
    for s in range(0, draws, chunk):
        m = min(chunk, draws - s)
        if process == "character":
            X = _characters(draw(m), N)
        elif process == "wss":
            atoms = 32
            f = draw(m * atoms).reshape(atoms, m)
            a = (rng.standard_normal((atoms, m)) + 1j * rng.standard_normal((atoms, m))) / math.sqrt(2 * atoms)
            nn = np.arange(N)[:, None, None]
            X = np.sum(a[None] * np.exp(2j * np.pi * np.mod(nn * f[None], 1.0)), axis=1)
        else:
            raise ParameterError(f"unknown process {process!r}")
        total = np.sum(np.abs(X) ** 2, axis=0)
        proj = np.sum(np.abs(U.conj().T @ X) ** 2, axis=0) if U.shape[1] else np.zeros(m)
        num.append(proj if tail else total - proj)
        den.append(total)
    num = np.concatenate(num)
    den = np.concatenate(den)
    mean = num.mean() / den.mean()
    # delta method for a ratio of means; reduces to the plain SE when den is constant
    resid = (num - mean * den) / den.mean()
    stderr = resid.std(ddof=1) / math.sqrt(draws)
    return float(mean), float(stderr), seed


class SinusoidK(NamedTuple):
    K: int
    max_residual: float
    saturated: bool


def uniform_sinusoid_K(N, W, eps, f_grid=None):
    """Smallest number of DPSS vectors that captures every sinusoid in the band.

    Finds the least ``K`` with
    ``max_f ||e_f - S_K S_K^* e_f||^2 / N <= eps`` over a uniform grid of
    at least ``64 N`` frequencies in ``[-W, W]``. Residuals for every ``K`` come
    from cumulative sums of the squared DPSS spectra, so the result is the
    exact minimizer over the grid rather than the end of a scan.
    """
    if not 0 < eps < 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2), got {eps!r}")
    if f_grid is None:
        f_grid = 64 * N
    if f_grid < 64 * N:
        raise ParameterError(f"f_grid must be at least 64 N = {64 * N}")
    freqs = np.linspace(-W, W, f_grid)
    S = dpss_basis(N, W, method="tridiagonal").eigenvectors
    worst = np.zeros(N + 1)
    worst[0] = 1.0
    for t in range(0, f_grid, 4096):
        energy = np.cumsum(np.abs(S.conj().T @ _characters(freqs[t : t + 4096], N)) ** 2, axis=0)
        worst[1:] = np.maximum(worst[1:], 1.0 - energy.min(axis=1) / N)
    ok = np.flatnonzero(worst <= eps)
    if ok.size == 0:
        return SinusoidK(N, float(worst[N]), True)
    K = int(ok[0])
    return SinusoidK(K, float(worst[K]), False)

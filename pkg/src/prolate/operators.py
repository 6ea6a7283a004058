"""Construction of time-limited Hermitian Toeplitz operators.

An operator on the window ``{0..n-1}`` is stored by its first column
``c[k] = h[k]``; the rest of the matrix follows from ``T[m, n] = h[m - n]``
and Hermitian symmetry ``h[-k] = conj(h[k])``. Two-dimensional operators on
``Z x Z`` are kept as a pair of 1-D factors and only materialized (as a
Kronecker product) on request.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ParameterError, ResolutionError, ValidationError
from .groups import (
    BandSpec,
    GroupKind,
    GroupSpec,
    band_measure,
    canonical_frequency,
    check_bandwidth,
)

__all__ = [
    "ToeplitzOperator",
    "SymbolGrid",
    "bandlimit_kernel",
    "prolate_operator",
    "periodic_prolate_operator",
    "prolate_operator_2d",
    "toeplitz_from_impulse",
    "toeplitz_from_symbol",
    "autocorrelation_operator",
]

HERMITIAN_TOL = 1e-12
MIN_GRID_FACTOR = 8


@dataclass(frozen=True, eq=False)
class ToeplitzOperator:
    """Hermitian time-limited Toeplitz operator.

    Attributes
    ----------
    first_column : ndarray
        ``h[0], ..., h[n-1]``. Real dtype when the operator is real symmetric.
        For a separable operator this is the first column of the Kronecker
        product, kept for reference only.
    group : GroupSpec
    symbol_tag : str
        Human-readable description of the generating symbol.
    band : BandSpec or None
        Set when the operator is a time-frequency limiting operator for this band.
    factors : tuple
        The two 1-D factors of a separable 2-D operator, otherwise empty.
    """

    first_column: np.ndarray
    group: GroupSpec = field(default_factory=GroupSpec.integers)
    symbol_tag: str = ""
    band: BandSpec | None = None
    factors: tuple = ()

    def __post_init__(self):
        col = np.asarray(self.first_column)
        if col.ndim != 1 or col.size == 0:
            raise ValidationError("first column must be a non-empty 1-D sequence")
        if np.iscomplexobj(col) and np.all(col.imag == 0):
            col = col.real
        col = col.astype(np.complex128 if np.iscomplexobj(col) else np.float64)
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)
        if abs(col[0].imag) > HERMITIAN_TOL:
            raise ValidationError(f"h[0] must be real for a Hermitian operator, got {col[0]}")

    @property
    def separable(self):
        return bool(self.factors)

    @property
    def shape(self):
        if self.separable:
            return tuple(f.n for f in self.factors)
        return (self.first_column.size,)

    @property
    def n(self):
        """Dimension of the operator (product of factor sizes when separable)."""
        return math.prod(self.shape)

    @property
    def is_real(self):
        if self.separable:
            return all(f.is_real for f in self.factors)
        return not np.iscomplexobj(self.first_column)

    def impulse(self):
        """Return ``h[-(n-1)], ..., h[n-1]`` as a centered array (1-D only)."""
        self._require_1d()
        c = self.first_column
        return np.concatenate([np.conj(c[:0:-1]), c])

    def to_dense(self):
        if self.separable:
            a, b = (f.to_dense() for f in self.factors)
            return np.kron(a, b)
        c = self.first_column
        return scipy.linalg.toeplitz(c, np.conj(c))

    def trace(self):
        if self.separable:
            return math.prod(f.trace() for f in self.factors)
        return float(self.n * self.first_column[0].real)

    def _require_1d(self):
        if self.separable:
            raise ValidationError("operation is defined for 1-D operators only")


def _as_lags(lag):
    lag = np.asarray(lag)
    if not np.issubdtype(lag.dtype, np.integer):
        if np.any(lag != np.round(lag)):
            raise ParameterError("lags must be integers")
        lag = lag.astype(np.int64)
    return lag


def _line_kernel(W, lags):
    lags = _as_lags(lags)
    out = np.empty(lags.shape, dtype=np.float64)
    zero = lags == 0
    m = lags[~zero].astype(np.float64)
    # sin(2 pi W m) with the angle reduced mod 2 pi; whole multiples of pi give exact zeros
    x = np.mod(2.0 * W * m, 2.0)
    out[~zero] = np.where(x == np.round(x), 0.0, np.sin(np.pi * x)) / (np.pi * m)
    out[zero] = 2.0 * W
    return out


def _cyclic_kernel(K, N, start, lags):
    lags = _as_lags(lags).astype(np.int64)
    out = np.empty(lags.shape, dtype=np.complex128)
    zero = np.mod(lags, N) == 0
    m = lags[~zero]
    # integer reduction of every angle mod 2N keeps exact zeros exact
    r = np.mod(m * K, 2 * N)
    num = np.where(r % N == 0, 0.0, np.sin(np.pi * r / N))
    den = np.sin(np.pi * np.mod(m, 2 * N) / N)
    phase = np.exp(1j * np.pi * np.mod(m * (K - 1) + 2 * m * start, 2 * N) / N)
    out[~zero] = phase * num / (N * den)
    out[zero] = (K / N) * np.exp(2j * np.pi * np.mod(lags[zero] * start, N) / N)
    return out


def bandlimit_kernel(group, band, lag):
    """Band-limiting kernel ``K_B(lag) = integral over B of chi_xi(lag)``.

    Scalar or array ``lag`` for 1-D groups; a pair ``(m1, m2)`` for ``Z x Z``.
    """
    band_measure(group, band)
    if group.kind is GroupKind.INT_LINE:
        val = _line_kernel(band.widths[0], lag)
    elif group.kind is GroupKind.CYCLIC:
        val = _cyclic_kernel(band.count, band.modulus, band.start, lag)
    else:
        m1, m2 = lag
        val = _line_kernel(band.widths[0], m1) * _line_kernel(band.widths[1], m2)
    return val[()] if np.ndim(val) == 0 else val


def _check_size(N, name="N"):
    if not (isinstance(N, numbers.Integral) and N >= 1):
        raise ParameterError(f"{name} must be a positive integer, got {N!r}")
    return int(N)


def prolate_operator(N, W):
    """The ``N x N`` prolate matrix with entries ``sin(2 pi W (m-n)) / (pi (m-n))``."""
    N = _check_size(N)
    check_bandwidth(W)
    band = BandSpec.symmetric(W)
    col = _line_kernel(W, np.arange(N))
    return ToeplitzOperator(col, GroupSpec.integers(), f"indicator[-{W!r},{W!r}]", band)


def periodic_prolate_operator(N, M, K):
    """Time-frequency limiting operator on ``Z_N`` for window ``{0..M-1}``
    and DFT band ``{0..K-1}`` (normalized dual measure, so the trace is ``MK/N``).
    """
    N = _check_size(N)
    M = _check_size(M, "M")
    K = _check_size(K, "K")
    if M > N or K > N:
        raise ParameterError(f"need 1 <= M, K <= N, got N={N}, M={M}, K={K}")
    band = BandSpec.index_block(K, N)
    col = _cyclic_kernel(K, N, 0, np.arange(M))
    return ToeplitzOperator(col, GroupSpec.cyclic(N), f"dft-block[0,{K})/{N}", band)


def prolate_operator_2d(N1, N2, W1, W2):
    """Separable 2-D prolate operator, the Kronecker product of two 1-D ones."""
    a = prolate_operator(N1, W1)
    b = prolate_operator(N2, W2)
    band = BandSpec.product(W1, W2)
    col = np.kron(a.first_column, b.first_column)
    return ToeplitzOperator(
        col, GroupSpec.integers_2d(), f"{a.symbol_tag} x {b.symbol_tag}", band, (a, b)
    )


def toeplitz_from_impulse(h, N, symbol_tag="impulse"):
    """Toeplitz operator ``H[m, n] = h[m - n]`` from a centered impulse response.

    ``h`` has odd length ``2L + 1`` and holds ``h[-L], ..., h[L]``; lags beyond
    ``L`` are zero. ``L`` may be smaller or larger than ``N - 1``.
    """
    N = _check_size(N)
    h = np.asarray(h)
    if h.ndim != 1 or h.size % 2 == 0:
        raise ValidationError("impulse response must be a 1-D sequence of odd length")
    L = h.size // 2
    pos, neg = h[L:], h[L::-1]
    if np.max(np.abs(pos - np.conj(neg))) > HERMITIAN_TOL:
        raise ValidationError("impulse response is not Hermitian: h[-k] != conj(h[k])")
    col = np.zeros(N, dtype=h.dtype if np.iscomplexobj(h) else np.float64)
    take = min(N, L + 1)
    col[:take] = pos[:take]
    return ToeplitzOperator(col, GroupSpec.integers(), symbol_tag)


@dataclass(frozen=True, eq=False)
class SymbolGrid:
    """Samples of a symbol on the uniform grid ``f_m = m / G``, ``m = 0..G-1``.

    Optional closed forms travel with the samples so that exact paths can be
    used where available:

    ``coefficients``
        ``{lag: h[lag]}`` for a trigonometric polynomial symbol.
    ``kernel``
        Callable mapping integer lags to exact Fourier coefficients.
    ``func``
        Callable evaluating the symbol at arbitrary frequencies.
    """

    samples: np.ndarray
    real_flag: bool = True
    coefficients: dict | None = None
    kernel: object = None
    func: object = None
    tag: str = "samples"
    band: BandSpec | None = None

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1 or s.size == 0:
            raise ValidationError("symbol samples must be a non-empty 1-D array")
        if self.real_flag:
            if np.iscomplexobj(s):
                if np.max(np.abs(s.imag)) > HERMITIAN_TOL:
                    raise ValidationError("real_flag set but symbol has imaginary part")
                s = s.real
            s = s.astype(np.float64)
        else:
            s = s.astype(np.complex128)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def grid_size(self):
        return self.samples.size

    @property
    def frequencies(self):
        return np.arange(self.grid_size) / self.grid_size

    @classmethod
    def from_function(cls, func, grid_size, tag="function", real=None):
        f = np.arange(grid_size) / grid_size
        values = np.asarray(func(canonical_frequency(f)))
        if real is None:
            real = not np.iscomplexobj(values) or np.max(np.abs(values.imag)) <= HERMITIAN_TOL
        return cls(values, real, func=func, tag=tag)

    @classmethod
    def from_samples(cls, samples, tag="samples"):
        samples = np.asarray(samples)
        real = not np.iscomplexobj(samples) or np.max(np.abs(samples.imag)) <= HERMITIAN_TOL
        return cls(samples, real, tag=tag)

    @classmethod
    def from_coefficients(cls, coefficients, grid_size, tag="trigonometric polynomial"):
        """Symbol ``sum_k h[k] exp(-j 2 pi f k)`` of a finite Fourier series."""
        coefficients = {int(k): complex(v) for k, v in coefficients.items()}
        f = np.arange(grid_size) / grid_size
        values = _eval_coefficients(coefficients, canonical_frequency(f))
        real = all(
            abs(coefficients.get(-k, 0.0) - np.conj(v)) <= HERMITIAN_TOL
            for k, v in coefficients.items()
        )
        coefficients = {k: (v.real if v.imag == 0 else v) for k, v in coefficients.items()}
        return cls(
            values,
            real,
            coefficients=coefficients,
            func=lambda x: _eval_coefficients(coefficients, x),
            tag=tag,
        )

    @classmethod
    def indicator(cls, W, grid_size):
        """Indicator of the band ``[-W, W]``; the kernel is known in closed form."""
        check_bandwidth(W)
        f = canonical_frequency(np.arange(grid_size) / grid_size)
        func = lambda x: (np.abs(canonical_frequency(x)) <= W).astype(float)  # noqa: E731
        return cls(
            func(f),
            True,
            kernel=lambda k: _line_kernel(W, k),
            func=func,
            tag=f"indicator[-{W!r},{W!r}]",
            band=BandSpec.symmetric(W),
        )

    def without_closed_forms(self):
        """Drop exact side information, forcing the quadrature path."""
        return SymbolGrid(self.samples, self.real_flag, tag=self.tag)

    def __call__(self, f):
        """Evaluate the symbol at frequencies ``f``.

        Uses the closed form when available, otherwise periodic linear
        interpolation between grid samples.
        """
        if self.func is not None:
            return np.asarray(self.func(canonical_frequency(f)))
        G = self.grid_size
        x = np.mod(np.asarray(f, dtype=float), 1.0) * G
        i0 = np.floor(x).astype(np.int64) % G
        t = x - np.floor(x)
        return (1 - t) * self.samples[i0] + t * self.samples[(i0 + 1) % G]

    def abs_squared(self):
        """The symbol ``|phi(f)|^2``, carrying closed forms through where possible."""
        samples = np.abs(self.samples) ** 2
        tag = f"|{self.tag}|^2"
        if self.coefficients is not None:
            coeffs = _autocorrelate(self.coefficients)
            return SymbolGrid.from_coefficients(coeffs, self.grid_size, tag)
        if self.band is not None:
            return self  # |1_B|^2 = 1_B
        func = None
        if self.func is not None:
            inner = self.func
            func = lambda x: np.abs(inner(x)) ** 2  # noqa: E731
        return SymbolGrid(samples, True, func=func, tag=tag)


def _eval_coefficients(coefficients, f):
    f = np.asarray(f, dtype=float)
    out = np.zeros(f.shape, dtype=np.complex128)
    for k, v in coefficients.items():
        out += v * np.exp(-2j * np.pi * np.mod(f * k, 1.0))
    if all(abs(coefficients.get(-k, 0.0) - np.conj(v)) <= HERMITIAN_TOL for k, v in coefficients.items()):
        return out.real
    return out


def _autocorrelate(coefficients):
    """``r[k] = sum_m phi[m + k] conj(phi[m])``: coefficients of ``|phi|^2``."""
    out = {}
    for a, va in coefficients.items():
        for b, vb in coefficients.items():
            out[a - b] = out.get(a - b, 0.0) + va * np.conj(vb)
    return out


def toeplitz_from_symbol(symbol, N):
    """Toeplitz operator whose coefficients are the Fourier coefficients of ``symbol``.

    ``h[k] = integral_0^1 symbol(f) exp(j 2 pi f k) df``. Closed forms are used
    directly; otherwise the integral is the trapezoid rule on the sample grid,
    which must have at least ``8 N`` points.
    """
    N = _check_size(N)
    if not symbol.real_flag:
        raise ValidationError("symbol must be real-valued for a Hermitian operator")
    lags = np.arange(N)
    if symbol.kernel is not None:
        col = np.asarray(symbol.kernel(lags))
    elif symbol.coefficients is not None:
        col = np.array([symbol.coefficients.get(int(k), 0.0) for k in lags])
    else:
        G = symbol.grid_size
        if G < MIN_GRID_FACTOR * N:
            raise ResolutionError(
                f"symbol grid of {G} points is too coarse for N={N}; need at least {MIN_GRID_FACTOR * N}"
            )
        col = np.fft.ifft(symbol.samples)[:N]
        if np.max(np.abs(col.imag)) <= HERMITIAN_TOL * max(1.0, np.max(np.abs(col))):
            col = col.real
    return ToeplitzOperator(col, GroupSpec.integers(), symbol.tag, symbol.band)


def autocorrelation_operator(pulse_symbol, N):
    """Toeplitz operator generated by the power spectrum ``|phi|^2`` of a pulse.

    This is the Gram operator of time-limited shifts of the pulse; its
    eigenvalues give the n-widths of the corresponding signal set.
    """
    return toeplitz_from_symbol(pulse_symbol.abs_squared(), N)

"""scikit-learn compatible wrappers around the Slepian machinery.

Rows of ``X`` are finite-length signals (one sample per column), so these
transformers slot into pipelines that featurize time series.
"""
from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import ParameterError
from .fastapply import multitaper_psd
from .spectral import dpss_basis

__all__ = ["SlepianProjector", "MultitaperPSD", "check_signals"]


def check_signals(X, n_features=None):
    """Validate a 2-D array of (possibly complex) signals.

    ``sklearn.utils.check_array`` refuses complex input, which is common
    here, so this applies the same checks by hand.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        raise ValueError("Expected 2D array, got 1D array instead; reshape with X.reshape(1, -1)")
    if X.ndim != 2:
        raise ValueError(f"Expected 2D array, got {X.ndim}D array instead")
    if not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise ValueError(f"signals must be numeric, got dtype {X.dtype}")
    X = X.astype(np.complex128 if np.iscomplexobj(X) else np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("Input contains NaN or infinity")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"Found array with shape {X.shape}; need at least one sample and one feature")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(
            f"X has {X.shape[1]} features, but the estimator was fitted with {n_features} features"
        )
    return X


def _half_bandwidth(NW, N):
    if not isinstance(NW, numbers.Real) or NW <= 0:
        raise ParameterError(f"NW must be positive, got {NW!r}")
    W = NW / N
    if W > 0.5:
        raise ParameterError(f"NW={NW} gives W={W} > 1/2 for signals of length {N}")
    return W


class SlepianProjector(TransformerMixin, BaseEstimator):
    """Project signals onto the leading DPSS vectors.

    Parameters
    ----------
    NW : float, default=4.0
        Time-half-bandwidth product; the half-bandwidth is ``W = NW / N``.
    n_components : int, optional
        Number of DPSS vectors kept. Defaults to ``ceil(2 NW)``, the
        time-frequency area.
    method : {"tridiagonal", "dense"}, default="tridiagonal"

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features_in_)
        DPSS vectors as rows.
    eigenvalues_ : ndarray of shape (n_components,)
        Their in-band energy concentrations.
    n_features_in_ : int
    """

    def __init__(self, NW=4.0, n_components=None, method="tridiagonal"):
        self.NW = NW
        self.n_components = n_components
        self.method = method

    def fit(self, X, y=None):
        X = check_signals(X)
        N = X.shape[1]
        W = _half_bandwidth(self.NW, N)
        k = self.n_components if self.n_components is not None else min(N, math.ceil(2 * self.NW))
        dec = dpss_basis(N, W, k, method=self.method)
        self.components_ = np.ascontiguousarray(dec.eigenvectors.T)
        self.eigenvalues_ = np.asarray(dec.eigenvalues)
        self.n_features_in_ = N
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_signals(X, self.n_features_in_)
        return X @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        return np.asarray(Z) @ self.components_


class MultitaperPSD(TransformerMixin, BaseEstimator):
    """Map each signal to its multitaper power spectrum estimate.

    Parameters
    ----------
    NW : float, default=4.0
    n_tapers : int, optional
        Defaults to ``ceil(2 NW) - 1``, the usual choice that drops the
        taper straddling the band edge.
    n_freqs : int, optional
        Length of the uniform frequency grid on ``[0, 1)``; defaults to ``N``.
    weighted : bool, default=False
        Weight the tapered spectra by DPSS eigenvalue instead of averaging.
    """

    def __init__(self, NW=4.0, n_tapers=None, n_freqs=None, weighted=False):
        self.NW = NW
        self.n_tapers = n_tapers
        self.n_freqs = n_freqs
        self.weighted = weighted

    def fit(self, X, y=None):
        X = check_signals(X)
        N = X.shape[1]
        W = _half_bandwidth(self.NW, N)
        K = self.n_tapers if self.n_tapers is not None else max(1, math.ceil(2 * self.NW) - 1)
        self.tapers_ = dpss_basis(N, W, K, method="tridiagonal")
        self.n_features_in_ = N
        self.half_bandwidth_ = W
        self.freqs_ = np.arange(self.n_freqs or N) / (self.n_freqs or N)
        return self

    def transform(self, X):
        check_is_fitted(self, "tapers_")
        X = check_signals(X, self.n_features_in_)
        return multitaper_psd(
            X,
            self.half_bandwidth_,
            len(self.tapers_),
            self.freqs_.size,
            weighted=self.weighted,
            tapers=self.tapers_,
        )

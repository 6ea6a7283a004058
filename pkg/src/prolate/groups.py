"""Discrete locally compact abelian groups, their duals and Haar conventions.

Three groups are supported:

* ``IntLine``   -- the integers, dual group the unit circle ``[-1/2, 1/2)``;
* ``CyclicN``   -- the cyclic group ``Z_N``, self-dual;
* ``Product2D`` -- ``Z x Z``, dual group the torus.

The Haar measure is fixed: counting measure on the group, Lebesgue measure
on the circle and normalized counting measure ``1/N`` on the dual of
``Z_N``. With this pairing Parseval holds without extra constants.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DomainError, ParameterError, ProlateError

__all__ = [
    "GroupKind",
    "GroupSpec",
    "TimeWindow",
    "BandSpec",
    "canonical_frequency",
    "character_eval",
    "band_measure",
    "spec_to_dict",
    "spec_from_dict",
]


class GroupKind(str, enum.Enum):
    INT_LINE = "IntLine"
    CYCLIC = "CyclicN"
    PRODUCT_2D = "Product2D"


@dataclass(frozen=True)
class GroupSpec:
    kind: GroupKind
    modulus: int | None = None

    def __post_init__(self):
        kind = GroupKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is GroupKind.CYCLIC:
            if not _is_int(self.modulus) or self.modulus < 1:
                raise ParameterError(f"CyclicN modulus must be a positive integer, got {self.modulus!r}")
            object.__setattr__(self, "modulus", int(self.modulus))
        elif self.modulus is not None:
            raise ParameterError(f"{kind.value} takes no modulus")

    @classmethod
    def integers(cls):
        return cls(GroupKind.INT_LINE)

    @classmethod
    def cyclic(cls, N):
        return cls(GroupKind.CYCLIC, N)

    @classmethod
    def integers_2d(cls):
        return cls(GroupKind.PRODUCT_2D)

    @property
    def ndim(self):
        return 2 if self.kind is GroupKind.PRODUCT_2D else 1


class WindowKind(str, enum.Enum):
    INDEX_BLOCK = "IndexBlock"
    BLOCK_2D = "Block2D"


@dataclass(frozen=True)
class TimeWindow:
    """The time-limiting set ``{0..N-1}`` or ``{0..N1-1} x {0..N2-1}``."""

    kind: WindowKind
    sizes: tuple

    def __post_init__(self):
        kind = WindowKind(self.kind)
        sizes = tuple(self.sizes)
        expected = 2 if kind is WindowKind.BLOCK_2D else 1
        if len(sizes) != expected:
            raise ParameterError(f"{kind.value} needs {expected} size(s), got {sizes}")
        if not all(_is_int(s) and s >= 1 for s in sizes):
            raise ParameterError(f"window sizes must be positive integers, got {sizes}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "sizes", tuple(int(s) for s in sizes))

    @classmethod
    def block(cls, n):
        return cls(WindowKind.INDEX_BLOCK, (n,))

    @classmethod
    def block_2d(cls, n1, n2):
        return cls(WindowKind.BLOCK_2D, (n1, n2))

    @property
    def size(self):
        """Haar (counting) measure of the window."""
        return math.prod(self.sizes)

    def check_group(self, group):
        if group.kind is GroupKind.PRODUCT_2D:
            if self.kind is not WindowKind.BLOCK_2D:
                raise ConfigurationError("Product2D group needs a Block2D window")
        else:
            if self.kind is not WindowKind.INDEX_BLOCK:
                raise ConfigurationError(f"{group.kind.value} group needs an IndexBlock window")
            if group.kind is GroupKind.CYCLIC and self.sizes[0] > group.modulus:
                raise ConfigurationError(
                    f"window length {self.sizes[0]} exceeds modulus {group.modulus}"
                )


class BandKind(str, enum.Enum):
    SYMMETRIC = "SymmetricBand"
    INDEX_BLOCK = "IndexBlock"
    PRODUCT = "ProductBand"


@dataclass(frozen=True)
class BandSpec:
    """A frequency band: a subset of the dual group.

    Build instances with :meth:`symmetric`, :meth:`index_block` or
    :meth:`product`; ``measure`` is filled in from the parameters.
    """

    kind: BandKind
    widths: tuple = ()
    count: int | None = None
    modulus: int | None = None
    start: int = 0
    measure: float = float("nan")

    def __post_init__(self):
        kind = BandKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is BandKind.INDEX_BLOCK:
            K, N = self.count, self.modulus
            if not (_is_int(K) and _is_int(N)) or N < 1:
                raise ParameterError("index block needs integer count K and modulus N")
            if not 1 <= K <= N:
                raise ParameterError(f"index block needs 1 <= K <= N, got K={K}, N={N}")
            if not _is_int(self.start) or not 0 <= self.start < N:
                raise ParameterError(f"index block start must lie in [0, N), got {self.start}")
            measure = K / N
        else:
            widths = tuple(float(w) for w in self.widths)
            expected = 2 if kind is BandKind.PRODUCT else 1
            if len(widths) != expected:
                raise ParameterError(f"{kind.value} needs {expected} width(s)")
            for W in widths:
                check_bandwidth(W)
            object.__setattr__(self, "widths", widths)
            measure = math.prod(2.0 * W for W in widths)
        object.__setattr__(self, "measure", measure)

    @classmethod
    def symmetric(cls, W):
        return cls(BandKind.SYMMETRIC, widths=(W,))

    @classmethod
    def index_block(cls, K, N, start=0):
        return cls(BandKind.INDEX_BLOCK, count=K, modulus=N, start=start)

    @classmethod
    def product(cls, W1, W2):
        return cls(BandKind.PRODUCT, widths=(W1, W2))

    @property
    def W(self):
        if self.kind is not BandKind.SYMMETRIC:
            raise AttributeError("only a symmetric band has a single half-width W")
        return self.widths[0]

    def contains(self, xi):
        """Membership test for a dual point (vectorized over the last axis for 2-D)."""
        if self.kind is BandKind.SYMMETRIC:
            return np.abs(canonical_frequency(xi)) <= self.widths[0]
        if self.kind is BandKind.INDEX_BLOCK:
            return np.mod(np.asarray(xi) - self.start, self.modulus) < self.count
        xi = np.asarray(xi, dtype=float)
        return (np.abs(canonical_frequency(xi[..., 0])) <= self.widths[0]) & (
            np.abs(canonical_frequency(xi[..., 1])) <= self.widths[1]
        )


def check_bandwidth(W):
    if not (isinstance(W, numbers.Real) and 0.0 < W <= 0.5):
        raise ParameterError(f"bandwidth W must lie in (0, 1/2], got {W!r}")


def canonical_frequency(f):
    """Wrap circle points into ``[-1/2, 1/2)``."""
    f = np.asarray(f, dtype=float)
    out = f - np.floor(f + 0.5)
    return out if out.ndim else float(out)


def _is_int(x):
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


def _check_group_point(group, g):
    if group.kind is GroupKind.PRODUCT_2D:
        if not isinstance(g, (tuple, list)) or len(g) != 2 or not all(_is_int(v) for v in g):
            raise DomainError(f"Z x Z point must be a pair of integers, got {g!r}")
    elif not _is_int(g):
        raise DomainError(f"group point must be an integer, got {g!r}")


def character_eval(group, xi, g):
    """Evaluate the character ``chi_xi(g)``.

    Parameters
    ----------
    group : GroupSpec
    xi : float, int or pair
        Dual point: a circle frequency for ``IntLine``, an integer residue for
        ``CyclicN``, a pair of frequencies for ``Product2D``.
    g : int or pair of int
        Group element.

    Returns
    -------
    complex
        A unit-modulus value.
    """
    _check_group_point(group, g)
    if group.kind is GroupKind.INT_LINE:
        if not (isinstance(xi, numbers.Real) and math.isfinite(xi)):
            raise DomainError(f"circle frequency must be a finite real, got {xi!r}")
        # reduce f*n mod 1 before exponentiating: keeps the phase small for large n
        phase = math.fmod(canonical_frequency(xi) * g, 1.0)
        return complex(np.exp(2j * np.pi * phase))
    if group.kind is GroupKind.CYCLIC:
        if not _is_int(xi):
            raise DomainError(f"Z_N dual point must be an integer, got {xi!r}")
        N = group.modulus
        return complex(np.exp(2j * np.pi * ((int(xi) * int(g)) % N) / N))
    if not isinstance(xi, (tuple, list)) or len(xi) != 2:
        raise DomainError(f"torus point must be a pair, got {xi!r}")
    g1, g2 = g
    line = GroupSpec.integers()
    return character_eval(line, xi[0], g1) * character_eval(line, xi[1], g2)


def band_measure(group, band):
    """Haar measure of ``band`` in the dual of ``group``."""
    compatible = {
        GroupKind.INT_LINE: BandKind.SYMMETRIC,
        GroupKind.CYCLIC: BandKind.INDEX_BLOCK,
        GroupKind.PRODUCT_2D: BandKind.PRODUCT,
    }
    if compatible[group.kind] is not band.kind:
        raise ConfigurationError(f"{band.kind.value} is not a subset of the dual of {group.kind.value}")
    if band.kind is BandKind.INDEX_BLOCK and band.modulus != group.modulus:
        raise ConfigurationError(f"band modulus {band.modulus} != group modulus {group.modulus}")
    return band.measure


# -- JSON config fragments -------------------------------------------------

def spec_to_dict(group, window, band):
    out = {"group": group.kind.value}
    if group.modulus is not None:
        out["N"] = group.modulus
    out["window"] = {"kind": window.kind.value, "sizes": list(window.sizes)}
    if band.kind is BandKind.INDEX_BLOCK:
        out["band"] = {"kind": band.kind.value, "K": band.count}
        if band.start:
            out["band"]["start"] = band.start
    else:
        out["band"] = {"kind": band.kind.value, "W": list(band.widths)}
    return out


def spec_from_dict(d):
    """Inverse of :func:`spec_to_dict`; returns ``(group, window, band)``."""
    try:
        kind = GroupKind(d["group"])
        group = GroupSpec(kind, d.get("N"))
        w = d["window"]
        window = TimeWindow(w["kind"], tuple(w["sizes"]))
        b = d["band"]
        bkind = BandKind(b["kind"])
        if bkind is BandKind.INDEX_BLOCK:
            band = BandSpec.index_block(b["K"], group.modulus, b.get("start", 0))
        else:
            widths = b["W"]
            if isinstance(widths, numbers.Real):
                widths = [widths]
            band = BandSpec(bkind, widths=tuple(widths))
    except KeyError as exc:
        raise ConfigurationError(f"missing field {exc.args[0]!r} in group/window/band config") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ProlateError):
            raise
        raise ConfigurationError(str(exc)) from exc
    window.check_group(group)
    band_measure(group, band)
    return group, window, band

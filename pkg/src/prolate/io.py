"""File formats: operator JSON, decomposition JSON and numeric CSV.

Floats are written with ``repr`` (JSON) or 17 significant digits (CSV), both
of which round-trip IEEE doubles exactly.
"""
from __future__ import annotations

import csv
import io as _io
import json
import os

import numpy as np

from .exceptions import ParseError
from .groups import BandKind, BandSpec, GroupKind, GroupSpec
from .operators import ToeplitzOperator
from .spectral import EigenDecomposition

__all__ = [
    "operator_to_dict",
    "operator_from_dict",
    "save_operator",
    "load_operator",
    "persist_decomposition",
    "load_decomposition",
    "write_csv",
    "read_vector_csv",
    "format_float",
]


def format_float(x):
    return format(float(x), ".17g")


def _pairs(values):
    values = np.asarray(values, dtype=np.complex128)
    return [[float(v.real), float(v.imag)] for v in values]


def _from_pairs(pairs, where):
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParseError(f"{where}: expected a list of [re, im] pairs")
    out = arr[:, 0] + 1j * arr[:, 1]
    return out.real if np.all(arr[:, 1] == 0) else out


def _group_to_dict(group):
    out = {"kind": group.kind.value}
    if group.modulus is not None:
        out["N"] = group.modulus
    return out


def _band_to_dict(band):
    if band is None:
        return None
    if band.kind is BandKind.INDEX_BLOCK:
        return {"kind": band.kind.value, "K": band.count, "N": band.modulus, "start": band.start}
    return {"kind": band.kind.value, "W": list(band.widths)}


def _band_from_dict(d):
    if d is None:
        return None
    kind = BandKind(d["kind"])
    if kind is BandKind.INDEX_BLOCK:
        return BandSpec.index_block(d["K"], d["N"], d.get("start", 0))
    return BandSpec(kind, widths=tuple(d["W"]))


def operator_to_dict(op):
    out = {
        "group": _group_to_dict(op.group),
        "n": list(op.shape) if op.separable else op.n,
        "separable": op.separable,
        "first_column": _pairs(op.first_column),
        "symbol_tag": op.symbol_tag,
        "band": _band_to_dict(op.band),
    }
    if op.separable:
        out["factors"] = [operator_to_dict(f) for f in op.factors]
    return out


def operator_from_dict(d):
    try:
        group = d["group"]
        group = GroupSpec(GroupKind(group["kind"]), group.get("N"))
        band = _band_from_dict(d.get("band"))
        if d.get("separable"):
            factors = tuple(operator_from_dict(f) for f in d["factors"])
            col = np.kron(factors[0].first_column, factors[1].first_column)
            return ToeplitzOperator(col, group, d.get("symbol_tag", ""), band, factors)
        col = _from_pairs(d["first_column"], "first_column")
        if col.size != d["n"]:
            raise ParseError(f"first_column has {col.size} entries but n = {d['n']}")
        return ToeplitzOperator(col, group, d.get("symbol_tag", ""), band)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed operator description: {exc!r}") from exc


def _load_json(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{os.fspath(path)}: not UTF-8", exc.start) from exc
    except json.JSONDecodeError as exc:
        offset = len(exc.doc[: exc.pos].encode("utf-8"))
        raise ParseError(f"{os.fspath(path)}: {exc.msg}", offset) from exc


def save_operator(op, path):
    with open(path, "w") as fh:
        json.dump(operator_to_dict(op), fh, indent=1)
        fh.write("\n")


def load_operator(path):
    return operator_from_dict(_load_json(path))


def persist_decomposition(dec, path):
    """Write an :class:`EigenDecomposition` as JSON (bit-exact eigenvalues)."""
    vecs = np.asarray(dec.eigenvectors)
    payload = {
        "format": "prolate.decomposition/1",
        "source": dec.source,
        "dimension": dec.dimension,
        "eigenvalues": [float(v) for v in dec.eigenvalues],
        "complex": bool(np.iscomplexobj(vecs)),
        "eigenvectors_re": vecs.real.T.tolist(),
    }
    if np.iscomplexobj(vecs):
        payload["eigenvectors_im"] = vecs.imag.T.tolist()
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_decomposition(path):
    d = _load_json(path)
    try:
        if d.get("format") != "prolate.decomposition/1":
            raise ParseError(f"{os.fspath(path)}: unknown decomposition format {d.get('format')!r}")
        vals = np.asarray(d["eigenvalues"], dtype=np.float64)
        n = int(d["dimension"])
        re = np.asarray(d["eigenvectors_re"], dtype=np.float64).reshape(vals.size, n).T
        vecs = re + 1j * np.asarray(d["eigenvectors_im"], dtype=np.float64).reshape(vals.size, n).T if d["complex"] else re
        return EigenDecomposition(vals, vecs, d.get("source", ""))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"{os.fspath(path)}: malformed decomposition: {exc!r}") from exc


def write_csv(path_or_buf, header, rows):
    """Write rows of numbers/strings; floats use 17 significant digits."""

    def cell(v):
        if isinstance(v, (float, np.floating)):
            return format_float(v)
        return str(v)

    own = isinstance(path_or_buf, (str, os.PathLike))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([cell(v) for v in row])
    finally:
        if own:
            fh.close()


def read_vector_csv(path):
    """Read a real or complex vector from CSV.

    Accepted layouts: one value per line, or columns ``re,im``. A single
    non-numeric header line is skipped; when the header names an ``im`` or
    ``imag`` column, it is used as the imaginary part.
    """
    with open(path, newline="") as fh:
        text = fh.read()
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{os.fspath(path)}: empty vector file")
    header = None
    try:
        float(rows[0][0])
    except ValueError:
        header = [c.strip().lower() for c in rows[0]]
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{os.fspath(path)}: non-numeric entry: {exc}") from exc
    if data.ndim != 2 or data.shape[0] == 0:
        raise ParseError(f"{os.fspath(path)}: ragged or empty vector file")
    if header is not None:
        re_col = next((i for i, h in enumerate(header) if h in ("re", "real", "value", "x", "y", "signal")), 0)
        im_col = next((i for i, h in enumerate(header) if h in ("im", "imag")), None)
    else:
        re_col, im_col = 0, (1 if data.shape[1] >= 2 else None)
    vec = data[:, re_col]
    if im_col is not None:
        vec = vec + 1j * data[:, im_col]
    return vec

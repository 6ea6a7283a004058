import numpy as np
import pytest

from prolate import (
    eig_hermitian,
    load_decomposition,
    load_operator,
    periodic_prolate_operator,
    persist_decomposition,
    prolate_operator,
    prolate_operator_2d,
    save_operator,
    toeplitz_from_impulse,
)
from prolate.exceptions import ParseError
from prolate.io import format_float, read_vector_csv, write_csv


@pytest.mark.parametrize(
    "op",
    [prolate_operator(16, 0.2), periodic_prolate_operator(20, 12, 5), prolate_operator_2d(4, 3, 0.25, 0.1)],
    ids=["prolate", "periodic", "2d"],
)
def test_operator_round_trip(tmp_path, op):
    path = tmp_path / "op.json"
    save_operator(op, path)
    back = load_operator(path)
    assert np.array_equal(back.first_column, op.first_column)
    assert back.separable == op.separable and back.shape == op.shape
    assert back.band == op.band and back.group == op.group
    assert np.array_equal(back.to_dense(), op.to_dense())


def test_identity_decomposition_round_trip(tmp_path):
    h = np.zeros(7)
    h[3] = 1.0
    dec = eig_hermitian(toeplitz_from_impulse(h, 4))
    persist_decomposition(dec, tmp_path / "d.json")
    back = load_decomposition(tmp_path / "d.json")
    assert np.array_equal(back.eigenvalues, dec.eigenvalues)
    assert np.array_equal(back.eigenvectors, dec.eigenvectors)


@pytest.mark.parametrize("op", [prolate_operator(64, 0.2), periodic_prolate_operator(32, 16, 6)], ids=["real", "complex"])
def test_decomposition_bit_exact(tmp_path, op):
    dec = eig_hermitian(op)
    persist_decomposition(dec, tmp_path / "d.json")
    back = load_decomposition(tmp_path / "d.json")
    assert np.max(np.abs(back.eigenvalues - dec.eigenvalues)) == 0.0
    assert np.array_equal(back.eigenvectors, dec.eigenvectors)


def test_truncated_file(tmp_path):
    dec = eig_hermitian(prolate_operator(8, 0.2))
    path = tmp_path / "d.json"
    persist_decomposition(dec, path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(ParseError) as info:
        load_decomposition(path)
    assert info.value.offset is not None and 0 < info.value.offset <= len(raw) // 2
    assert "byte offset" in str(info.value)


def test_wrong_format(tmp_path):
    path = tmp_path / "d.json"
    path.write_text('{"format": "other"}')
    with pytest.raises(ParseError):
        load_decomposition(path)
    path.write_text('{"group": {"kind": "IntLine"}, "n": 3, "first_column": [[1, 0]]}')
    with pytest.raises(ParseError):
        load_operator(path)


def test_csv_round_trip(tmp_path):
    values = np.random.default_rng(0).standard_normal(5) * 1e-7
    write_csv(tmp_path / "v.csv", ["value"], [(float(v),) for v in values])
    assert np.array_equal(read_vector_csv(tmp_path / "v.csv"), values)
    assert float(format_float(np.pi)) == np.pi


def test_complex_csv(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("re,im\n1,2\n3,-4\n")
    assert np.array_equal(read_vector_csv(path), [1 + 2j, 3 - 4j])
    path.write_text("0.5\n1.5\n")
    assert np.array_equal(read_vector_csv(path), [0.5, 1.5])


def test_bad_csv(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("x\n1\nfoo\n")
    with pytest.raises(ParseError):
        read_vector_csv(path)
    path.write_text("")
    with pytest.raises(ParseError):
        read_vector_csv(path)

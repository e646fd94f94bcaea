import numpy as np
import pytest

from roundingrank import Factorization, io


def test_dense_roundtrip(tmp_path):
    path = tmp_path / "m.txt"
    io.write_matrix(path, np.eye(3, dtype=int))
    assert np.array_equal(io.read_matrix(path), np.eye(3, dtype=np.uint8))


def test_sparse_roundtrip_matches_dense(tmp_path, rng):
    B = (rng.random((6, 4)) < 0.4).astype(np.uint8)
    dense, sparse = tmp_path / "d.txt", tmp_path / "s.txt"
    io.write_matrix(dense, B, fmt="dense")
    io.write_matrix(sparse, B, fmt="sparse")
    assert np.array_equal(io.read_matrix(dense), io.read_matrix(sparse))


def test_sparse_with_zero_triples(tmp_path):
    path = tmp_path / "z.txt"
    path.write_text("2 3 0\n")
    assert np.array_equal(io.read_matrix(path), np.zeros((2, 3), dtype=np.uint8))


def test_malformed_entry_names_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2\n0 2\n")
    with pytest.raises(io.MatrixFormatError, match=":2:"):
        io.read_matrix(path)


def test_sparse_duplicate_is_error(tmp_path):
    path = tmp_path / "dup.txt"
    path.write_text("2 2 2\n1 1\n1 1\n")
    with pytest.raises(io.MatrixFormatError, match="duplicate"):
        io.read_matrix(path)


def test_sparse_out_of_range(tmp_path):
    path = tmp_path / "oob.txt"
    path.write_text("2 2 1\n3 1\n")
    with pytest.raises(io.MatrixFormatError, match="outside"):
        io.read_matrix(path)


def test_explicit_format_mismatch(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text("2 2 1\n1 1\n")
    with pytest.raises(io.MatrixFormatError):
        io.read_matrix(path, fmt="dense")


def test_size_guard(tmp_path):
    path = tmp_path / "big.txt"
    path.write_text("100000 100000 0\n")
    with pytest.raises(io.MatrixFormatError, match="size guard"):
        io.read_matrix(path)


def test_factorization_roundtrip_bit_exact(tmp_path, rng):
    f = Factorization(rng.normal(size=(4, 3)), rng.normal(size=(5, 3)),
                      tau=0.1234567890123456789)
    path = tmp_path / "f.txt"
    io.write_factorization(path, f)
    g = io.read_factorization(path)
    assert np.array_equal(f.L, g.L)
    assert np.array_equal(f.R, g.R)
    assert f.tau == g.tau


def test_factorization_truncated_file(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("2 2 1 0.5\n1.0\n")
    with pytest.raises(io.MatrixFormatError, match="ends early"):
        io.read_factorization(path)

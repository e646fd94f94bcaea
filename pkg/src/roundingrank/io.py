"""Text file formats for binary matrices and factorizations.

Dense matrix format: a header line "m n" followed by m lines of n
space-separated 0/1 tokens.

Sparse matrix format: a header line "m n nnz" followed by nnz lines
"i j" (1-based) naming the one-entries.  Duplicate entries are an
error.  Sparse files are densified on read; both representations of
the same matrix read back equal entrywise.

Factorization format: a header line "m n k tau" followed by m lines of
k reals (the left factor) and n lines of k reals (the right factor),
written with full double round-trip precision.
"""

import numpy as np

from .matrix import Factorization, as_binary

# densification guard: refuse matrices with more entries than this
MAX_DENSE_ENTRIES = 100_000_000


class MatrixFormatError(ValueError):
    """Raised for malformed matrix or factorization files."""


def _fail(path, lineno, msg):
    raise MatrixFormatError(f"{path}:{lineno}: {msg}")


def _read_lines(path):
    with open(path, "r", encoding="ascii") as fh:
        return fh.read().splitlines()


def read_matrix(path, fmt="auto", max_entries=MAX_DENSE_ENTRIES):
    """Read a binary matrix from a dense or sparse text file.

    fmt is "dense", "sparse", or "auto"; auto picks by the number of
    header tokens (2 for dense, 3 for sparse).
    """
    lines = _read_lines(path)
    if not lines:
        _fail(path, 1, "empty file")
    header = lines[0].split()
    if fmt == "auto":
        if len(header) == 2:
            fmt = "dense"
        elif len(header) == 3:
            fmt = "sparse"
        else:
            _fail(path, 1, f"expected 'm n' or 'm n nnz' header, got {lines[0]!r}")
    try:
        dims = [int(tok) for tok in header]
    except ValueError:
        _fail(path, 1, f"non-integer header token in {lines[0]!r}")
    if fmt == "dense":
        if len(dims) != 2:
            _fail(path, 1, "dense header must be 'm n'")
        m, n = dims
        nnz = None
    else:
        if len(dims) != 3:
            _fail(path, 1, "sparse header must be 'm n nnz'")
        m, n, nnz = dims
    if m < 1 or n < 1:
        _fail(path, 1, f"matrix dimensions must be positive, got {m} x {n}")
    if m * n > max_entries:
        raise MatrixFormatError(
            f"{path}: {m} x {n} exceeds the dense size guard of {max_entries} entries"
        )

    if fmt == "dense":
        if len(lines) < 1 + m:
            _fail(path, len(lines), f"expected {m} matrix rows, file ends early")
        out = np.empty((m, n), dtype=np.uint8)
        for i in range(m):
            toks = lines[1 + i].split()
            if len(toks) != n:
                _fail(path, 2 + i, f"expected {n} entries, got {len(toks)}")
            for j, tok in enumerate(toks):
                if tok == "0":
                    out[i, j] = 0
                elif tok == "1":
                    out[i, j] = 1
                else:
                    _fail(path, 2 + i, f"entry must be 0 or 1, got {tok!r}")
        return out

    if nnz < 0:
        _fail(path, 1, "nnz must be non-negative")
    if len(lines) < 1 + nnz:
        _fail(path, len(lines), f"expected {nnz} coordinate lines, file ends early")
    out = np.zeros((m, n), dtype=np.uint8)
    for t in range(nnz):
        toks = lines[1 + t].split()
        if len(toks) != 2:
            _fail(path, 2 + t, f"expected 'i j', got {lines[1 + t]!r}")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            _fail(path, 2 + t, f"non-integer coordinate in {lines[1 + t]!r}")
        if not (1 <= i <= m and 1 <= j <= n):
            _fail(path, 2 + t, f"coordinate ({i}, {j}) outside {m} x {n}")
        if out[i - 1, j - 1]:
            _fail(path, 2 + t, f"duplicate entry ({i}, {j})")
        out[i - 1, j - 1] = 1
    return out


def write_matrix(path, b, fmt="dense"):
    """Write a binary matrix as dense or sparse text."""
    b = as_binary(b)
    m, n = b.shape
    with open(path, "w", encoding="ascii") as fh:
        if fmt == "dense":
            fh.write(f"{m} {n}\n")
            for row in b:
                fh.write(" ".join("1" if v else "0" for v in row) + "\n")
        elif fmt == "sparse":
            ii, jj = np.nonzero(b)
            fh.write(f"{m} {n} {len(ii)}\n")
            for i, j in zip(ii, jj):
                fh.write(f"{i + 1} {j + 1}\n")
        else:
            raise ValueError(f"unknown matrix format {fmt!r}")


def _parse_real_row(path, lineno, line, k):
    toks = line.split()
    if len(toks) != k:
        _fail(path, lineno, f"expected {k} reals, got {len(toks)}")
    try:
        return [float(tok) for tok in toks]
    except ValueError:
        _fail(path, lineno, f"non-numeric entry in {line!r}")


def read_factorization(path):
    """Read a factorization written by write_factorization."""
    lines = _read_lines(path)
    if not lines:
        _fail(path, 1, "empty file")
    toks = lines[0].split()
    if len(toks) != 4:
        _fail(path, 1, f"expected 'm n k tau' header, got {lines[0]!r}")
    try:
        m, n, k = int(toks[0]), int(toks[1]), int(toks[2])
        tau = float(toks[3])
    except ValueError:
        _fail(path, 1, f"malformed header {lines[0]!r}")
    if len(lines) < 1 + m + n:
        _fail(path, len(lines), f"expected {m + n} factor rows, file ends early")
    left = np.array(
        [_parse_real_row(path, 2 + i, lines[1 + i], k) for i in range(m)], dtype=np.float64
    )
    right = np.array(
        [_parse_real_row(path, 2 + m + j, lines[1 + m + j], k) for j in range(n)],
        dtype=np.float64,
    )
    left = left.reshape(m, k)
    right = right.reshape(n, k)
    return Factorization(left, right, tau)


def write_factorization(path, f):
    """Write a factorization with full double round-trip precision."""
    m, n = f.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m} {n} {f.k} {f.tau!r}\n")
        for row in f.L:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        for row in f.R:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")

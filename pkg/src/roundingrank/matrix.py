"""Core matrix types, thresholded rounding, and error metrics.

Binary matrices are plain numpy arrays with dtype uint8 and entries in
{0, 1}; sign matrices are their {-1, +1} counterparts (int8); real
matrices are float64 arrays with finite entries.  `Factorization` pairs
two real factor matrices with the rounding threshold that turns their
product back into a binary matrix.

All functions here are pure and all returned objects are safe to share
across threads.
"""

from dataclasses import dataclass, field

import numpy as np


def as_binary(a):
    """Validate and return a 2-d {0,1} matrix as a uint8 array."""
    b = np.asarray(a)
    if b.ndim != 2 or b.size == 0:
        raise ValueError("binary matrix must be 2-d and non-empty")
    if not np.isin(b, (0, 1)).all():
        raise ValueError("binary matrix entries must be 0 or 1")
    return b.astype(np.uint8, copy=False)


def as_real(a):
    """Validate and return a 2-d finite real matrix as a float64 array."""
    x = np.asarray(a, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise ValueError("real matrix must be 2-d and non-empty")
    if not np.isfinite(x).all():
        raise ValueError("real matrix entries must be finite")
    return x


def round_threshold(a, tau):
    """Round a real matrix elementwise: 1 where a >= tau, else 0.

    The threshold itself rounds up, so ties map to 1.
    """
    a = as_real(a)
    if not np.isfinite(tau):
        raise ValueError("rounding threshold must be finite")
    return (a >= tau).astype(np.uint8)


def to_sign(b):
    """Map a binary matrix to its sign matrix (0 -> -1, 1 -> +1)."""
    b = as_binary(b)
    return (2 * b.astype(np.int8) - 1).astype(np.int8)


def is_mixed(b):
    """True if b has no constant column, or no constant row.

    A matrix is mixed when no column is all-zero or all-one; the row
    orientation is accepted as well, so the check is the disjunction of
    both readings.
    """
    b = as_binary(b)
    m, n = b.shape
    col_sums = b.sum(axis=0)
    row_sums = b.sum(axis=1)
    cols_ok = bool(((col_sums > 0) & (col_sums < m)).all())
    rows_ok = bool(((row_sums > 0) & (row_sums < n)).all())
    return cols_ok or rows_ok


def hamming_error(b, c):
    """Number of entries in which two binary matrices of equal shape disagree."""
    b = as_binary(b)
    c = as_binary(c)
    if b.shape != c.shape:
        raise ValueError(f"shape mismatch: {b.shape} vs {c.shape}")
    return int((b != c).sum())


def relative_error(b, c):
    """Disagreement count divided by the number of non-zeros of b."""
    b = as_binary(b)
    nnz = int(b.sum())
    if nnz == 0:
        raise ValueError("relative error is undefined for an all-zero reference matrix")
    return hamming_error(b, c) / nnz


def density(b):
    """Fraction of one-entries."""
    return float(as_binary(b).mean())


@dataclass(frozen=True)
class Factorization:
    """Factor pair (L, R) with rounding threshold tau.

    L is m x k, R is n x k; reconstruct() is the m x n product L R^T and
    round() applies the threshold to it.  Instances are immutable.
    """

    L: np.ndarray
    R: np.ndarray
    tau: float = 0.5

    def __post_init__(self):
        L = as_real(self.L)
        R = as_real(self.R)
        if L.shape[1] != R.shape[1]:
            raise ValueError(f"inner dimensions differ: {L.shape[1]} vs {R.shape[1]}")
        if L.shape[1] < 1:
            raise ValueError("inner dimension must be at least 1")
        if not np.isfinite(self.tau):
            raise ValueError("rounding threshold must be finite")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def k(self):
        return self.L.shape[1]

    @property
    def shape(self):
        return (self.L.shape[0], self.R.shape[0])

    def reconstruct(self):
        return self.L @ self.R.T

    def round(self):
        return round_threshold(self.reconstruct(), self.tau)


def rounds_to(f, b):
    """True when the factorization rounds exactly to the binary matrix b."""
    return bool(np.array_equal(f.round(), as_binary(b)))


@dataclass
class RankEstimate:
    """Outcome of one rank estimator run.

    kind is "upper" or "lower".  Upper bounds always carry a witness
    factorization that rounds exactly to the input matrix; lower bounds
    carry none.  log keeps (tested value, outcome) pairs in scan order.
    """

    method: str
    kind: str
    value: int
    witness: Factorization | None = None
    elapsed: float = 0.0
    log: list = field(default_factory=list)
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("upper", "lower"):
            raise ValueError(f"kind must be 'upper' or 'lower', got {self.kind!r}")

"""Rank bounds and constructive witness transforms.

spectral_lower_bound derives a lower bound on the threshold-0 rounding
rank from the singular values of the sign matrix.  The remaining
operations rewrite an existing witness: moving it to a new threshold by
appending a constant column (rank + 1) or by rescaling one factor
(rank unchanged), and lifting it to an entrywise non-negative witness
two dimensions higher.  Every transform preserves the rounded matrix
exactly.
"""

import time

import numpy as np

from .matrix import Factorization, RankEstimate, as_binary, to_sign

# singular values below this fraction of the largest count as zero
SINGULAR_TOL = 1e-10


def spectral_lower_bound(B):
    """Lower-bound the rounding rank at threshold 0.

    Uses the singular values s_1 >= ... >= s_r of the sign matrix: the
    bound is the smallest d with (d+1) * sum_{i<=d} s_i^2 >= m*n.  The
    bound applies to threshold 0; bounds at other thresholds differ from
    it by at most one (see shift_threshold), which the note records.
    """
    B = as_binary(B)
    m, n = B.shape
    t0 = time.perf_counter()
    try:
        s = np.linalg.svd(to_sign(B).astype(np.float64), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"SVD of the sign matrix failed: {exc}") from exc
    r = int((s > SINGULAR_TOL * s[0]).sum())
    cum = np.cumsum(s[:r] ** 2)
    target = float(m * n)
    value = r
    log = []
    for d in range(1, r + 1):
        met = (d + 1) * cum[d - 1] >= target
        log.append((d, "met" if met else "below"))
        if met:
            value = d
            break
    return RankEstimate(
        method="lowerbound",
        kind="lower",
        value=value,
        witness=None,
        elapsed=time.perf_counter() - t0,
        log=log,
        note="bounds the rounding rank at threshold 0; add 1 for other thresholds",
    )


def shift_threshold(f, tau_new):
    """Move a witness to a new threshold by appending a constant column.

    L' = [L | c 1], R' = [R | 1] with c = tau_new - tau shifts every
    reconstructed entry by c, so rounding at tau_new equals rounding at
    the old threshold.  Inner dimension grows by one.
    """
    m, n = f.shape
    c = float(tau_new) - f.tau
    L2 = np.column_stack([f.L, np.full(m, c)])
    R2 = np.column_stack([f.R, np.ones(n)])
    return Factorization(L2, R2, float(tau_new))


def scale_threshold(f, tau_new):
    """Move a witness to a same-sign nonzero threshold by rescaling R.

    Requires tau != 0, tau_new != 0 and equal signs; multiplying R by
    tau_new / tau preserves the rounding with the inner dimension
    unchanged.
    """
    tau_new = float(tau_new)
    if f.tau == 0 or tau_new == 0:
        raise ValueError("scale_threshold requires nonzero thresholds")
    if (f.tau > 0) != (tau_new > 0):
        raise ValueError("scale_threshold requires thresholds of equal sign")
    return Factorization(f.L, f.R * (tau_new / f.tau), tau_new)


def nonnegative_lift(f):
    """Rewrite a threshold-1/2 witness with non-negative factors, rank + 2.

    Each right row r gains the coordinates -1/2 and 1/2 - sum(r), is
    scaled into [-1/2, 1/2] and shifted up by 1/2.  Each left row l is
    offset by c = max(|l|, 1), extended with c+1 and c, normalized to
    unit l1 norm and rescaled so that the products land on the same
    side of 1/2 as before.  The rounded matrix is preserved exactly.
    """
    if f.tau != 0.5:
        raise ValueError("nonnegative_lift expects a witness with threshold 1/2")
    L, R = f.L, f.R
    m, n = f.shape
    k = f.k

    R1 = np.column_stack([R, np.full(n, -0.5), 0.5 - R.sum(axis=1)])
    d = np.abs(R1).max(axis=1)  # >= 1/2 because of the appended -1/2
    R2 = R1 / (2.0 * d)[:, None]
    R3 = R2 + 0.5

    c = np.maximum(np.abs(L).max(axis=1), 1.0)
    L1 = np.column_stack([L + c[:, None], c + 1.0, c])
    nrm = L1.sum(axis=1)  # entries are non-negative, so this is the l1 norm
    if not (nrm > 0).all():
        raise AssertionError("degenerate normalization; c >= 1 should prevent this")
    L2 = L1 / nrm[:, None]
    alpha = ((k + 2) * c + 1.0 + L.sum(axis=1)) / (2.0 * nrm)
    L3 = L2 / (2.0 * alpha)[:, None]

    out = Factorization(L3, R3, 0.5)
    if out.L.min() < 0 or out.R.min() < 0:
        raise AssertionError("lift produced a negative factor entry")
    return out


def identity_rank2_witness(n):
    """Rank-2 factorization that rounds to the n x n identity at threshold 1/2.

    Row i of L is (2^-i, -4^-i / 2) and row j of R is (2^j, 4^j); the
    product is exactly 1/2 on the diagonal and below 1/2 elsewhere.
    """
    if n < 1:
        raise ValueError("n must be positive")
    i = np.arange(n, dtype=np.float64)
    L = np.column_stack([2.0 ** (-i), -0.5 * 4.0 ** (-i)])
    R = np.column_stack([2.0 ** i, 4.0 ** i])
    return Factorization(L, R, 0.5)


def full_rank_witness(B, tau=0.5):
    """Trivial exact witness with inner dimension min(m, n).

    Shifts B - 1/2 to the requested threshold and factors through an
    identity block, so the rounding is exact for every tau.
    """
    B = as_binary(B)
    m, n = B.shape
    W = float(tau) + (B.astype(np.float64) - 0.5)
    if m <= n:
        return Factorization(np.eye(m), W.T, float(tau))
    return Factorization(W, np.eye(n), float(tau))

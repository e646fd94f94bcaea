"""Spectral rank estimators: rounded truncated SVD and nuclear-norm relaxation.

The SVD estimator rounds the rank-k truncated SVD for growing k until
the rounding reproduces the input; the rank-k SVD is the closest
real rank-k matrix in Frobenius norm, so its rounding tends to be close
too.  The unrounded truncated SVD doubles as a baseline for the
minimum-error problem.

The nuclear-norm estimator minimizes the sum of singular values subject
to the entrywise rounding constraints (a strict inequality on the
zero-entries, realized with a small margin).  The convex program is
solved by ADMM with singular-value soft-thresholding on one side and a
box projection on the other, which keeps the solver self-contained.
The returned matrix usually carries many tiny singular values, so it is
post-processed by zeroing the smallest singular values that do not
affect the rounding, from the smallest upward.
"""

import time

import numpy as np

from .bounds import full_rank_witness
from .matrix import (Factorization, RankEstimate, as_binary, hamming_error,
                     round_threshold, rounds_to)

# relative cutoff for counting singular values after nuclear post-truncation
NUCLEAR_RANK_TOL = 1e-8


def _svd(B):
    return np.linalg.svd(as_binary(B).astype(np.float64), full_matrices=False)


def svd_estimate_rank(B, tau=0.5):
    """First k whose rounded rank-k truncated SVD equals B.

    Scans k = 1, ..., min(m, n); at tau in (0, 1] the exact SVD at
    k = min(m, n) always succeeds.  For thresholds outside that range
    the binary matrix itself need not round to itself, so the trivial
    identity-block witness serves as a final fallback.
    """
    B = as_binary(B)
    m, n = B.shape
    t0 = time.perf_counter()
    U, S, Vt = _svd(B)
    W = np.zeros((m, n))
    log = []
    for k in range(1, min(m, n) + 1):
        W += S[k - 1] * np.outer(U[:, k - 1], Vt[k - 1])
        if np.array_equal(round_threshold(W, tau), B):
            f = Factorization(U[:, :k] * S[:k], Vt[:k].T, tau)
            if rounds_to(f, B):
                log.append((k, "yes"))
                return RankEstimate("svd", "upper", k, f,
                                    time.perf_counter() - t0, log)
        log.append((k, "no"))
    log.append((min(m, n), "fallback"))
    return RankEstimate("svd", "upper", min(m, n), full_rank_witness(B, tau),
                        time.perf_counter() - t0, log,
                        note="rounded SVD never matched; trivial identity witness")


def svd_min_error(B, k, tau=0.5):
    """Best rounded truncation among ranks 1..k.

    Computes the rounded rank-l truncated SVD for every l = 1, ..., k
    and keeps the smallest disagreement count (ties to the smaller l).
    Returns (C, factorization, errors) where errors[l-1] is the
    disagreement count of level l.
    """
    B = as_binary(B)
    m, n = B.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k must be in 1..{min(m, n)}, got {k}")
    U, S, Vt = _svd(B)
    errors = np.empty(k, dtype=np.int64)
    for ell in range(1, k + 1):
        approx = (U[:, :ell] * S[:ell]) @ Vt[:ell]
        errors[ell - 1] = hamming_error(B, round_threshold(approx, tau))
    best = int(np.argmin(errors)) + 1
    f = Factorization(U[:, :best] * S[:best], Vt[:best].T, tau)
    C = f.round()
    return C, f, errors


def trunc_svd_baseline(B, k):
    """Rank-k SVD approximation without rounding.

    Returns (approximation, residual) with the residual the squared
    Frobenius error relative to the squared norm of B.
    """
    B = as_binary(B)
    if not 1 <= k <= min(B.shape):
        raise ValueError(f"k must be in 1..{min(B.shape)}, got {k}")
    U, S, Vt = _svd(B)
    approx = (U[:, :k] * S[:k]) @ Vt[:k]
    total = float((S**2).sum())
    tail = float((S[k:] ** 2).sum())
    return approx, (tail / total if total > 0 else 0.0)


def _svt(X, thresh):
    """Singular value soft-thresholding."""
    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    S = np.maximum(S - thresh, 0.0)
    return (U * S) @ Vt


def nuclear_estimate_rank(B, tau=0.5, eps=1e-3, admm_iters=500, rho=1.0, tol=1e-6):
    """Upper bound from nuclear-norm minimization; None when the solve fails.

    Minimizes the nuclear norm over matrices with entries >= tau + eps
    on the one-cells and <= tau - eps on the zero-cells (eps realizes
    the strict inequality).  After ADMM, the smallest r is found whose
    rank-r truncation of the solution still rounds to B; that truncation
    is the witness.  Non-convergence is reported as failure (None),
    never as a bound.
    """
    B = as_binary(B)
    Bf = B.astype(np.float64)
    m, n = B.shape
    t0 = time.perf_counter()
    ones = B == 1
    lo = np.where(ones, tau + eps, -np.inf)
    hi = np.where(ones, np.inf, tau - eps)

    Z = np.clip(Bf, lo, hi)  # feasible start
    X = Z.copy()
    U = np.zeros((m, n))
    iters_used = admm_iters
    for it in range(admm_iters):
        X = _svt(Z - U, 1.0 / rho)
        Z_prev = Z
        Z = np.clip(X + U, lo, hi)
        U = U + X - Z
        primal = np.linalg.norm(X - Z)
        dual = rho * np.linalg.norm(Z - Z_prev)
        scale = 1.0 + np.linalg.norm(Z)
        if primal <= tol * scale and dual <= tol * scale:
            iters_used = it + 1
            break

    candidate = None
    if np.array_equal(round_threshold(X, tau), B):
        candidate = X
    elif np.array_equal(round_threshold(Z, tau), B):
        candidate = Z
    if candidate is None:
        return None

    U2, S2, Vt2 = np.linalg.svd(candidate, full_matrices=False)
    r_max = int((S2 > NUCLEAR_RANK_TOL * S2[0]).sum()) if S2[0] > 0 else 0
    log = [(iters_used, "admm iterations")]
    for r in range(1, max(r_max, 1) + 1):
        f = Factorization(U2[:, :r] * S2[:r], Vt2[:r].T, tau)
        if rounds_to(f, B):
            log.append((r, "rounds"))
            return RankEstimate("nuclear", "upper", r, f,
                                time.perf_counter() - t0, log)
        log.append((r, "no"))
    return None

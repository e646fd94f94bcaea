"""Row-permutation upper bound via sign-pattern polynomials.

Reordering the rows changes, per column, how often the bit pattern
flips when read top to bottom.  A column with f flips is the sign
pattern of a degree-f polynomial with one root between each consecutive
flip pair, so after assigning a scalar parameter to every row, the
matrix factors through polynomial evaluation: row i of the left factor
holds the basis functions at the row's parameter, row j of the right
factor the coefficients of column j's polynomial.  The inner dimension
is (max flips over columns) + 1, an upper bound for the rounding rank
at threshold 0 which a row ordering that keeps similar rows adjacent
drives down.

Rows are parameterized by Chebyshev points in [-1, 1] and polynomials
are expressed in the Chebyshev basis: with the power basis the
evaluation-times-coefficients product loses the sign information to
cancellation already around degree 25, which matches the known
exponential bit growth of exact witnesses.  Per-column coefficients are
normalized by their largest magnitude.

Unlike implementations that require square inputs, the construction is
shape-agnostic.
"""

import time

import numpy as np
from numpy.polynomial import chebyshev

from .bounds import shift_threshold
from .matrix import Factorization, RankEstimate, as_binary, rounds_to, to_sign

COEF_LIMIT = 1e300


def _greedy_chain(u, dist, start):
    """Nearest-neighbor chaining over unique rows (ties to the lowest index)."""
    nu = u.shape[0]
    order = [start]
    remaining = np.ones(nu, dtype=bool)
    remaining[start] = False
    cur = start
    for _ in range(nu - 1):
        d = dist[cur].astype(np.float64).copy()
        d[~remaining] = np.inf
        cur = int(np.argmin(d))
        order.append(cur)
        remaining[cur] = False
    return np.array(order)


def order_rows(B, seed=0):
    """Heuristic row permutation that keeps the worst column flip count low.

    Duplicate rows always end up adjacent.  Two candidate orderings of
    the distinct rows are tried (descending row sums, and greedy
    Hamming nearest-neighbor chaining from a seeded start row) and the
    one with the smaller maximum flip count wins.  Deterministic per
    seed; quality heuristic, not optimal.
    """
    B = as_binary(B)
    m = B.shape[0]
    if m == 1:
        return np.array([0])
    u, inv = np.unique(B, axis=0, return_inverse=True)
    nu = u.shape[0]
    groups = [np.flatnonzero(inv == g) for g in range(nu)]

    by_sums = np.argsort(-u.sum(axis=1).astype(np.int64), kind="stable")
    dist = (u[:, None, :] != u[None, :, :]).sum(axis=2)
    rng = np.random.default_rng(seed)
    chained = _greedy_chain(u, dist, int(rng.integers(nu)))

    best_perm, best_flips = None, None
    for cand in (by_sums, chained):
        perm = np.concatenate([groups[g] for g in cand])
        flips = column_flips(B, perm)[1]
        if best_flips is None or flips < best_flips:
            best_perm, best_flips = perm, flips
    return best_perm


def column_flips(B, perm):
    """Per-column bit flip counts under a row permutation, plus the maximum."""
    B = as_binary(B)
    perm = np.asarray(perm)
    if sorted(perm.tolist()) != list(range(B.shape[0])):
        raise ValueError("perm must be a permutation of the row indices")
    diffs = np.diff(B[perm].astype(np.int8), axis=0) != 0
    counts = diffs.sum(axis=0).astype(int)
    return counts, int(counts.max(initial=0))


def polynomial_factorization(B, perm):
    """Threshold-0 witness of inner dimension (max flips) + 1.

    Row perm[i] receives the i-th Chebyshev point t_i; column j becomes
    a polynomial with one root at the midpoint of every consecutive
    flip pair of the permuted column, signed so that the first run
    matches the column's first bit.  The reconstruction has no zero
    entries and its signs equal the sign matrix of B (verified).
    Coefficient overflow raises with advice to use smaller instances:
    exact witnesses are known to need entries exponential in the matrix
    size, so very large or adversarial inputs cannot be represented.
    """
    B = as_binary(B)
    perm = np.asarray(perm)
    m, n = B.shape
    Bp = B[perm]
    t = np.cos((2.0 * np.arange(1, m + 1) - 1.0) * np.pi / (2.0 * m))  # descending
    flip_pos = [np.flatnonzero(np.diff(Bp[:, j].astype(np.int8)) != 0) for j in range(n)]
    d = max((len(p) for p in flip_pos), default=0)

    V = chebyshev.chebvander(t, d)
    L = np.empty_like(V)
    L[perm] = V

    R = np.zeros((n, d + 1))
    for j in range(n):
        pos = flip_pos[j]
        roots = (t[pos] + t[pos + 1]) / 2.0
        coef = chebyshev.chebfromroots(roots) if len(roots) else np.array([1.0])
        if not np.isfinite(coef).all() or np.abs(coef).max() > COEF_LIMIT:
            raise ArithmeticError(
                "polynomial coefficients overflowed; the construction cannot "
                "represent this instance in doubles, use smaller matrices"
            )
        sgn = 1.0 if Bp[0, j] == 1 else -1.0
        R[j, : len(coef)] = coef * (sgn / np.abs(coef).max())

    f = Factorization(L, R, 0.0)
    P = f.reconstruct()
    if (P == 0.0).any() or not np.array_equal(np.sign(P).astype(np.int8), to_sign(B)):
        raise ArithmeticError(
            "sign verification of the polynomial witness failed; "
            "use smaller matrices"
        )
    return f


def estimate_rank(B, tau=0.5, seed=0, order_restarts=3):
    """Upper bound (max flips under the best tried ordering) + 1 at threshold 0.

    For other thresholds the witness is shifted, which costs one more
    dimension.  The returned witness is verified in both cases.
    """
    B = as_binary(B)
    t0 = time.perf_counter()
    log = []
    best_perm, best_flips = None, None
    for s in range(order_restarts):
        perm = order_rows(B, seed + s)
        flips = column_flips(B, perm)[1]
        log.append((flips, f"ordering seed {seed + s}"))
        if best_flips is None or flips < best_flips:
            best_perm, best_flips = perm, flips
    f0 = polynomial_factorization(B, best_perm)
    if tau == 0.0:
        witness, value = f0, best_flips + 1
    else:
        witness, value = shift_threshold(f0, tau), best_flips + 2
    if not rounds_to(witness, B):
        raise ArithmeticError("permutation witness failed verification")
    return RankEstimate("perm", "upper", value, witness,
                        time.perf_counter() - t0, log)

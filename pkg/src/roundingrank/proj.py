"""Monte Carlo rank estimation through random projection and linear programs.

The rows of the input matrix are points that the identity factorization
separates perfectly; a sparse random projection maps them to dimension
d while approximately preserving distances.  If one feasibility LP per
column finds separating hyperplanes in the projected space, the matrix
has rounding rank at most d and the LP solutions assemble into a
verified witness.  Infeasibility proves nothing (the answer is
"unknown"), so scanning d = 1, 2, ... yields a one-sided upper bound.

The minimum-error variant adds per-row slack variables, soft-margin
style, and minimizes their sum.
"""

import time
from dataclasses import dataclass

import numpy as np

from .bounds import full_rank_witness
from .lp import GEQ, LEQ, LpNumericalError, LpProblem, solve
from .matrix import Factorization, RankEstimate, as_binary, hamming_error, round_threshold, rounds_to


@dataclass(frozen=True)
class ProjConfig:
    """Knobs for the projection estimator.

    epsilon is the strict-separation margin of the LPs.  Margins at
    machine-epsilon scale vanish under simplex round-off, so the default
    is 1e-9 rather than the smallest representable positive double.
    repetitions draws that many independent projections per dimension
    (extra draws can only improve a Monte Carlo upper bound).
    """

    epsilon: float = 1e-9
    d_max: int | None = None
    repetitions: int = 1
    seed: int = 0
    lp_max_iters: int = 20000

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.d_max is not None and self.d_max < 1:
            raise ValueError("d_max must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


def achlioptas_project(B, d, seed):
    """Project the rows of B to dimension d with a sparse sign matrix.

    The projection matrix has i.i.d. entries sqrt(3) * s with
    s in {+1, 0, -1} at probabilities {1/6, 2/3, 1/6}, scaled by
    1/sqrt(d); in expectation it preserves squared row norms.
    Deterministic per seed.
    """
    B = as_binary(B)
    if d < 1:
        raise ValueError("projection dimension must be at least 1")
    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([1.0, 0.0, -1.0]), size=(B.shape[1], d),
                       p=[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0])
    A = np.sqrt(3.0 / d) * signs
    return B.astype(np.float64) @ A


def _column_lp(L, col, tau, eps):
    """Feasibility LP for one column: find r with L_i . r on the right side."""
    m, d = L.shape
    rel = np.where(col == 1, GEQ, LEQ).astype(np.int8)
    rhs = np.where(col == 1, tau + eps, tau - eps)
    return LpProblem(
        objective=np.zeros(d),
        a=L,
        relations=rel,
        b=rhs,
        nonneg=np.zeros(d, dtype=bool),
    )


def try_dimension(B, d, tau=0.5, cfg=None):
    """Attempt a rank-d witness; returns (factorization or None, hit_limit).

    Projects the rows to dimension d with cfg.seed, then solves one LP
    per column.  Success assembles the hyperplane normals into a
    factorization that is verified to round exactly to B before it is
    returned; any infeasible column means "unknown" (None).  A column
    whose LP runs out of iterations also yields None, with the limit
    flag set.
    """
    cfg = cfg or ProjConfig()
    B = as_binary(B)
    m, n = B.shape
    L = achlioptas_project(B, d, cfg.seed)
    R = np.empty((n, d))
    for j in range(n):
        try:
            sol = solve(_column_lp(L, B[:, j], tau, cfg.epsilon), cfg.lp_max_iters)
        except LpNumericalError:
            return None, True
        if sol.status == "iteration_limit":
            return None, True
        if sol.status != "optimal":
            return None, False
        R[j] = sol.x
    f = Factorization(L, R, tau)
    if not rounds_to(f, B):
        # feasible to LP tolerance but not under exact rounding
        return None, True
    return f, False


def estimate_rank(B, tau=0.5, cfg=None):
    """Upper-bound the rounding rank by scanning d = 1, 2, ...

    Linear scan (large-d LPs are too slow to make bisection pay off).
    Each d gets cfg.repetitions independent projections.  If d_max is
    exhausted the trivial identity-block witness of dimension min(m, n)
    is returned, so the estimate always terminates with a verified
    upper bound.
    """
    cfg = cfg or ProjConfig()
    B = as_binary(B)
    m, n = B.shape
    d_max = min(m, n) if cfg.d_max is None else min(cfg.d_max, min(m, n))
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    log = []
    for d in range(1, d_max + 1):
        for rep in range(cfg.repetitions):
            sub = ProjConfig(
                epsilon=cfg.epsilon,
                d_max=cfg.d_max,
                repetitions=1,
                seed=int(rng.integers(0, 2**63)),
                lp_max_iters=cfg.lp_max_iters,
            )
            witness, limited = try_dimension(B, d, tau, sub)
            if witness is not None:
                log.append((d, "yes"))
                return RankEstimate("proj", "upper", d, witness,
                                    time.perf_counter() - t0, log)
        log.append((d, "limit" if limited else "unknown"))
    log.append((min(m, n), "fallback"))
    return RankEstimate("proj", "upper", min(m, n), full_rank_witness(B, tau),
                        time.perf_counter() - t0, log,
                        note="d_max exhausted; trivial identity witness")


def _minerr_column_lp(L, col, tau, eps):
    """Slack LP for one column: minimize total slack over (r, c >= 0)."""
    m, d = L.shape
    # variables: r (free, d) then c (nonneg, m)
    a = np.zeros((m, d + m))
    a[:, :d] = L
    sign = np.where(col == 1, 1.0, -1.0)
    a[np.arange(m), d + np.arange(m)] = sign
    rel = np.where(col == 1, GEQ, LEQ).astype(np.int8)
    rhs = np.where(col == 1, tau + eps, tau - eps)
    obj = np.concatenate([np.zeros(d), np.ones(m)])
    nonneg = np.concatenate([np.zeros(d, dtype=bool), np.ones(m, dtype=bool)])
    return LpProblem(objective=obj, a=a, relations=rel, b=rhs, nonneg=nonneg)


def min_error_decomposition(B, k, tau=0.5, cfg=None):
    """Approximate the best rank-k rounding: returns (C, factorization, fallbacks).

    Projects to dimension k once, then per column minimizes the slack
    needed to place every row on its side of the threshold.  C is the
    rounding of the assembled factorization, so rrank(C) <= k by
    construction.  Columns whose LP fails (iteration limit) fall back
    to the zero normal vector and are listed in fallbacks.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    cfg = cfg or ProjConfig()
    B = as_binary(B)
    m, n = B.shape
    L = achlioptas_project(B, k, cfg.seed)
    R = np.zeros((n, k))
    fallbacks = []
    for j in range(n):
        try:
            sol = solve(_minerr_column_lp(L, B[:, j], tau, cfg.epsilon), cfg.lp_max_iters)
        except LpNumericalError:
            sol = None
        if sol is None or sol.status != "optimal":
            fallbacks.append(j)
            continue
        R[j] = sol.x[:k]
    f = Factorization(L, R, tau)
    C = round_threshold(f.reconstruct(), tau)
    return C, f, fallbacks

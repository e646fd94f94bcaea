"""Logistic PCA: Bernoulli maximum likelihood with a logistic link.

Each entry is modeled as Bernoulli with success probability
f(theta_ij - tau), theta = L R^T and f the logistic function.  Shifting
the link by the rounding threshold makes the model's hard decision at
probability 1/2 coincide with thresholded rounding of theta, so
"round the fitted product" and "round the fitted probabilities at 1/2"
agree by construction.

Fitting alternates damped Newton updates over the rows of L and of R
(each row is an independent k-dimensional logistic regression given the
other factor), with a backtracking line search so the log-likelihood
never decreases across accepted steps.  The model has no bias terms.
"""

import time
from dataclasses import dataclass

import numpy as np

from .bounds import full_rank_witness
from .matrix import (Factorization, RankEstimate, as_binary, hamming_error,
                     round_threshold, rounds_to)

PROB_CLIP = 1e-12


@dataclass(frozen=True)
class LpcaConfig:
    """Optimizer knobs.

    restarts counts initializations per fit: the first is a
    deterministic warm start from the truncated SVD of 2B - 1, the rest
    draw i.i.d. normal entries scaled by init_scale.  k_max caps the
    rank scan of estimate_rank (None scans to min(m, n)).
    """

    max_iters: int = 500
    tol: float = 1e-6
    restarts: int = 3
    init_scale: float = 0.1
    damping: float = 1e-6
    seed: int = 0
    k_max: int | None = None

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("iteration and restart counts must be positive")
        if self.tol <= 0 or self.init_scale <= 0 or self.damping <= 0:
            raise ValueError("tol, init_scale and damping must be positive")


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def log_likelihood(B, L, R, tau):
    """Bernoulli log-likelihood of B under the shifted logistic model."""
    y = 2.0 * as_binary(B) - 1.0
    margin = y * (L @ R.T - tau)
    return float(-np.logaddexp(0.0, -margin).sum())


def gradients(B, L, R, tau):
    """Analytic gradient of log_likelihood with respect to L and R."""
    B = as_binary(B)
    E = B - _sigmoid(L @ R.T - tau)
    return E @ R, E.T @ L


def _row_loglik(B, L, R, tau):
    y = 2.0 * B - 1.0
    margin = y * (L @ R.T - tau)
    return -np.logaddexp(0.0, -margin).sum(axis=1)


def _newton_rows(B, L, R, tau, damping):
    """One damped Newton step with backtracking on every row of L."""
    m, k = L.shape
    P = _sigmoid(L @ R.T - tau)
    P = np.clip(P, PROB_CLIP, 1.0 - PROB_CLIP)
    W = P * (1.0 - P)
    G = (B - P) @ R
    H = np.einsum("ij,ja,jb->iab", W, R, R, optimize=True)
    idx = np.arange(k)
    ridge = damping
    for _ in range(8):
        try:
            Hd = H.copy()
            Hd[:, idx, idx] += ridge
            step = np.linalg.solve(Hd, G[..., None])[..., 0]
            break
        except np.linalg.LinAlgError:
            ridge *= 100.0
    else:
        return L

    base = _row_loglik(B, L, R, tau)
    t = np.ones(m)
    accepted = np.zeros(m, dtype=bool)
    for _ in range(25):
        cand = L + np.where(accepted[:, None], 0.0, t[:, None] * step)
        new = _row_loglik(B, cand, R, tau)
        better = new >= base
        newly = better & ~accepted
        if newly.any():
            L = np.where(newly[:, None], cand, L)
            base = np.where(newly, new, base)
            accepted |= newly
        if accepted.all():
            break
        t = np.where(accepted, t, t / 2.0)
    return L


def _separating_threshold(theta, B, tau):
    """Threshold tau' with round_tau'(theta) = B and the sign of tau.

    A fitted product certifies rank k at tau as soon as its one-entries
    and zero-entries are separated by any threshold of the same sign:
    rescaling one factor by tau / tau' moves the witness back to tau
    without changing the rank.  Returns None when no admissible
    threshold exists (tau = 0 admits only 0 itself).
    """
    ones = B == 1
    omin = float(theta[ones].min()) if ones.any() else np.inf
    zmax = float(theta[~ones].max()) if not ones.all() else -np.inf
    if not zmax < omin:
        return None
    if zmax < tau <= omin:
        return tau
    if tau > 0:
        lo = max(zmax, 0.0)
        if omin <= lo:
            return None
        return lo + 1.0 if np.isinf(omin) else (lo + omin) / 2.0
    if tau < 0:
        hi = min(omin, 0.0)
        if zmax >= hi:
            return None
        return hi - 1.0 if np.isinf(zmax) else (zmax + hi) / 2.0
    return None


def _certificate(B, L, R, tau, theta=None):
    """Exact-rounding factors at tau from the current fit, or None."""
    if theta is None:
        theta = L @ R.T
    tp = _separating_threshold(theta, B, tau)
    if tp is None:
        return None
    Rc = R if tp == tau else R * (tau / tp)
    if rounds_to(Factorization(L, Rc, tau), B):
        return L, Rc
    return None


def _fit_single(B, tau, cfg, L0, R0, stop_on_exact, patience=None):
    """Alternate Newton sweeps from one initialization.

    Returns (L, R, loglik, history, exact) where history holds the
    log-likelihood after every optimizer sweep and exact flags an
    exact-rounding certificate (possibly reached through a rank
    preserving threshold rescale of the fit).  With patience set, a fit
    that has not lowered its rounding error for that many sweeps stops
    early; rank scans use this since only the certificate matters there.
    """
    Bf = B.astype(np.float64)
    L, R = L0.copy(), R0.copy()
    ll = log_likelihood(B, L, R, tau)
    if not np.isfinite(ll):
        raise FloatingPointError("non-finite initial likelihood")
    history = [ll]
    if stop_on_exact:
        cert = _certificate(B, L, R, tau)
        if cert is not None:
            L, R = cert
            return L, R, log_likelihood(B, L, R, tau), history, True
    exact = False
    best_err = None
    stale = 0
    y = 2.0 * Bf - 1.0
    for _ in range(cfg.max_iters):
        L = _newton_rows(Bf, L, R, tau, cfg.damping)
        R = _newton_rows(Bf.T, R, L, tau, cfg.damping)
        theta = L @ R.T
        new_ll = float(-np.logaddexp(0.0, -(y * (theta - tau))).sum())
        if not np.isfinite(new_ll):
            raise FloatingPointError("likelihood diverged")
        history.append(new_ll)
        if stop_on_exact:
            cert = _certificate(B, L, R, tau, theta)
            if cert is not None:
                L, R = cert
                exact = True
                break
        if patience is not None:
            err = int(((theta >= tau) != (B == 1)).sum())
            if best_err is None or err < best_err:
                best_err, stale = err, 0
            else:
                stale += 1
                if stale >= patience:
                    break
        if new_ll - ll <= cfg.tol * (abs(ll) + 1.0):
            break
        ll = new_ll
    if not stop_on_exact:
        exact = rounds_to(Factorization(L, R, tau), B)
    final_ll = log_likelihood(B, L, R, tau) if exact else history[-1]
    return L, R, final_ll, history, exact


def _inits(B, k, cfg):
    """Structured candidates first, then seeded random draws.

    The deterministic starts are the truncated SVD of 2B - 1 and, at
    k = 1, the closed-form rank-1 witness when one exists (the likelihood
    surface hides that basin from generic starts, while the decision
    procedure is exact and cheap).
    """
    m, n = B.shape
    if k == 1 and B.any():
        from .nested import rrank1_decide

        ok, witness = rrank1_decide(B)
        if ok:
            l, r = witness
            yield l[:, None].astype(np.float64), r[:, None].astype(np.float64)
    U, S, Vt = np.linalg.svd(2.0 * B.astype(np.float64) - 1.0, full_matrices=False)
    root = np.sqrt(S[:k])
    yield U[:, :k] * root, Vt[:k].T * root
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts - 1):
        yield (cfg.init_scale * rng.standard_normal((m, k)),
               cfg.init_scale * rng.standard_normal((n, k)))


def fit(B, k, tau=0.5, cfg=None, stop_on_exact=False, patience=None):
    """Maximum-likelihood fit at rank k; returns (factorization, loglik).

    Runs cfg.restarts initializations and keeps the best local optimum
    (with stop_on_exact, an exactly-rounding fit wins immediately).
    Diverging restarts are skipped; if every restart diverges the fit
    fails.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    cfg = cfg or LpcaConfig()
    B = as_binary(B)
    best = None
    for L0, R0 in _inits(B, k, cfg):
        try:
            L, R, ll, _, exact = _fit_single(B, tau, cfg, L0, R0, stop_on_exact,
                                             patience=patience)
        except FloatingPointError:
            continue
        if best is None or ll > best[2]:
            best = (L, R, ll, exact)
        if exact and stop_on_exact:
            best = (L, R, ll, exact)
            break
    if best is None:
        raise ArithmeticError("all restarts diverged")
    L, R, ll, _ = best
    return Factorization(L, R, tau), ll


def estimate_rank(B, tau=0.5, cfg=None):
    """Upper-bound the rounding rank by scanning k = 1, 2, ...

    The first k whose fit rounds exactly to B is returned with the fit
    as a verified witness; if the scan cap is reached the trivial
    identity-block witness of dimension min(m, n) is used.
    """
    cfg = cfg or LpcaConfig()
    B = as_binary(B)
    m, n = B.shape
    k_cap = min(m, n) if cfg.k_max is None else min(cfg.k_max, min(m, n))
    t0 = time.perf_counter()
    log = []
    for k in range(1, k_cap + 1):
        f, _ = fit(B, k, tau, cfg, stop_on_exact=True, patience=30)
        if rounds_to(f, B):
            log.append((k, "exact"))
            return RankEstimate("lpca", "upper", k, f, time.perf_counter() - t0, log)
        log.append((k, "no"))
    log.append((min(m, n), "fallback"))
    return RankEstimate("lpca", "upper", min(m, n), full_rank_witness(B, tau),
                        time.perf_counter() - t0, log,
                        note="scan cap reached; trivial identity witness")


def min_error(B, k, tau=0.5, cfg=None):
    """Fit at rank k and round: returns (C, factorization).

    Restarts are compared by disagreement count first, log-likelihood
    second.
    """
    cfg = cfg or LpcaConfig()
    B = as_binary(B)
    best = None
    for L0, R0 in _inits(B, k, cfg):
        try:
            L, R, ll, _, _ = _fit_single(B, tau, cfg, L0, R0, stop_on_exact=True)
        except FloatingPointError:
            continue
        C = round_threshold(L @ R.T, tau)
        err = hamming_error(B, C)
        key = (err, -ll)
        if best is None or key < best[0]:
            best = (key, Factorization(L, R, tau), C)
        if err == 0:
            break
    if best is None:
        raise ArithmeticError("all restarts diverged")
    return best[2], best[1]

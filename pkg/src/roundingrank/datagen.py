"""Synthetic matrices with a planted rounding rank, plus bit-flip noise.

Factor entries are drawn i.i.d. so that the product of an m x k and a
k x n factor has expected entry value mu: each factor entry has mean
q = sqrt(mu / k), drawn either uniformly from [q - 1/2, q + 1/2] or
normally with variance 1.  Rounding the product plants an upper bound
of k on the rounding rank (the true rank can be lower).

Noise flips a number of entries equal to round(p * nnz) where nnz
counts the non-zeros of the noise-free matrix; flip positions are drawn
without replacement over all cells.
"""

import math
from dataclasses import dataclass

import numpy as np

from .matrix import Factorization, round_threshold


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one synthetic matrix."""

    m: int
    n: int
    k: int
    dist: str = "uniform"
    mu: float = 0.5
    noise: float = 0.0
    tau: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.k < 1:
            raise ValueError("m, n and k must be positive")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.noise < 0:
            raise ValueError("noise level must be non-negative")
        if self.dist not in ("uniform", "normal"):
            raise ValueError(f"unknown distribution {self.dist!r}")


def generate(spec):
    """Sample (B, planted factorization) from a GenSpec.

    The factorization certifies rounding rank at most k for the
    noise-free product; when spec.noise > 0 the returned matrix has the
    flips applied (drawn from the same seeded stream) and the witness
    still refers to the pre-noise matrix.  Identical seeds give
    bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    q = math.sqrt(spec.mu / spec.k)
    if spec.dist == "uniform":
        L = rng.uniform(q - 0.5, q + 0.5, size=(spec.m, spec.k))
        R = rng.uniform(q - 0.5, q + 0.5, size=(spec.n, spec.k))
    else:
        L = rng.normal(q, 1.0, size=(spec.m, spec.k))
        R = rng.normal(q, 1.0, size=(spec.n, spec.k))
    planted = Factorization(L, R, spec.tau)
    B = round_threshold(planted.reconstruct(), spec.tau)
    if spec.noise > 0:
        B = _flip(B, spec.noise, rng)
    return B, planted


def add_noise(B, p, seed):
    """Flip round(p * nnz(B)) distinct uniformly chosen cells."""
    from .matrix import as_binary

    return _flip(as_binary(B), p, np.random.default_rng(seed))


def _flip(B, p, rng):
    if p < 0:
        raise ValueError("noise level must be non-negative")
    nnz = int(B.sum())
    flips = int(math.floor(p * nnz + 0.5))  # nearest, ties up
    if flips > B.size:
        raise ValueError(f"{flips} flips requested but the matrix has {B.size} cells")
    out = B.copy()
    if flips:
        idx = rng.choice(B.size, size=flips, replace=False)
        flat = out.reshape(-1)
        flat[idx] ^= 1
    return out

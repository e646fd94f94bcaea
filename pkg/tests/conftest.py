"""Shared helpers for the test suite."""

import itertools

import numpy as np
import pytest


def random_staircase(m, n, density, rng):
    """Row/column-permuted nested matrix with roughly the given density."""
    p = np.sort(rng.binomial(n, density, size=m))[::-1]
    B = (np.arange(n)[None, :] < p[:, None]).astype(np.uint8)
    return B[rng.permutation(m)][:, rng.permutation(n)]


def all_binary_matrices(m, n):
    """Iterate every m x n binary matrix."""
    for bits in itertools.product((0, 1), repeat=m * n):
        yield np.array(bits, dtype=np.uint8).reshape(m, n)


def random_binary(m, n, density, rng):
    return (rng.random((m, n)) < density).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import itertools

import numpy as np
import pytest

from roundingrank import round_threshold
from roundingrank.nested import (is_directly_nested, is_nested,
                                 nested_rank1_construct, nexhaust,
                                 rrank1_decide, svd_nested)
from conftest import all_binary_matrices, random_staircase


def _nested_oracle_batch(m, n):
    """Exhaustive permutation oracle over every m x n binary matrix.

    Returns the stacked matrices and a boolean vector: for each matrix,
    whether some row and column permutation is directly nested
    (non-increasing along rows and columns).
    """
    mats = np.array(list(all_binary_matrices(m, n)), dtype=np.int8)
    found = np.zeros(len(mats), dtype=bool)
    for rp in itertools.permutations(range(m)):
        sub = mats[:, list(rp), :]
        for cp in itertools.permutations(range(n)):
            M = sub[:, :, list(cp)]
            ok = ((np.diff(M, axis=1) <= 0).all(axis=(1, 2))
                  & (np.diff(M, axis=2) <= 0).all(axis=(1, 2)))
            found |= ok
    return mats.astype(np.uint8), found


def _nested_inclusion_reference(M):
    """Independent nestedness check: rows totally ordered by inclusion."""
    if M.size == 0:
        return True
    rows = [frozenset(np.flatnonzero(r)) for r in np.asarray(M)]
    return all(a <= b or b <= a for a in rows for b in rows)


def _rrank1_oracle(B):
    """Exhaustive split oracle: two-block diagonal with nested blocks.

    Permutations only matter through which rows/columns land in which
    block, so the search runs over all row and column bipartitions; each
    induced block is tested with the inclusion reference (which covers
    every within-block permutation).
    """
    m, n = B.shape
    for rmask_bits in range(2**m):
        rmask = np.array([(rmask_bits >> i) & 1 for i in range(m)], dtype=bool)
        for cmask_bits in range(2**n):
            cmask = np.array([(cmask_bits >> j) & 1 for j in range(n)], dtype=bool)
            if B[np.ix_(rmask, ~cmask)].any() or B[np.ix_(~rmask, cmask)].any():
                continue
            if (_nested_inclusion_reference(B[np.ix_(rmask, cmask)])
                    and _nested_inclusion_reference(B[np.ix_(~rmask, ~cmask)])):
                return True
    return False


def test_is_directly_nested_examples():
    stair = np.array([[1, 1, 1], [1, 1, 0], [0, 0, 0]], dtype=np.uint8)
    assert is_directly_nested(stair)
    assert not is_directly_nested(np.eye(2, dtype=np.uint8))
    assert is_directly_nested(np.zeros((3, 2), dtype=np.uint8))
    assert not is_directly_nested(np.array([[0, 1], [0, 0]], dtype=np.uint8))


def test_is_nested_examples(rng):
    stair = random_staircase(6, 5, 0.5, rng)
    ok, rp, cp = is_nested(stair)
    assert ok
    assert is_directly_nested(stair[rp][:, cp])
    assert not is_nested(np.eye(3, dtype=np.uint8))[0]
    col = np.array([[1], [0], [1], [0]], dtype=np.uint8)
    assert is_nested(col)[0]


@pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)])
def test_is_nested_agrees_with_permutation_oracle(m, n):
    mats, oracle = _nested_oracle_batch(m, n)
    for B, expect in zip(mats, oracle):
        assert is_nested(B)[0] == expect
        # the inclusion ordering is an equivalent characterization
        assert _nested_inclusion_reference(B) == expect


def test_construct_on_staircase_hand_values():
    B = (np.arange(4)[None, :] < np.arange(4, 0, -1)[:, None]).astype(np.uint8)
    l, r = nested_rank1_construct(B)
    assert np.array_equal(l, [4, 3, 2, 1])
    assert np.allclose(r, [1, 1 / 3, 1 / 5, 1 / 7])
    assert l[1] * r[2] == pytest.approx(3 / 5)   # a one-entry, above 1/2
    assert l[3] * r[1] == pytest.approx(1 / 3)   # a zero-entry, below 1/2
    assert np.array_equal(round_threshold(np.outer(l, r), 0.5), B)


def test_construct_matches_power_of_two_variant(rng):
    # the doubling-based factors certify the same rounding on small inputs
    for _ in range(40):
        B = random_staircase(int(rng.integers(1, 8)), int(rng.integers(1, 8)),
                             float(rng.uniform(0.2, 0.8)), rng)
        l, r = nested_rank1_construct(B)
        ok, rp, cp = is_nested(B)
        p = B[rp][:, cp].sum(axis=1).astype(np.float64)
        l2 = np.empty_like(l)
        r2 = np.empty_like(r)
        l2[rp] = 2.0 ** (p - 1)
        r2[cp] = 2.0 ** -np.arange(1, B.shape[1] + 1, dtype=np.float64)
        ours = round_threshold(np.outer(l, r), 0.5)
        theirs = round_threshold(np.outer(l2, r2), 0.5)
        assert np.array_equal(ours, theirs)
        assert np.array_equal(ours, B)


def test_construct_zero_row_and_one_entry():
    one = np.array([[1]], dtype=np.uint8)
    l, r = nested_rank1_construct(one)
    assert l[0] * r[0] >= 0.5
    B = np.array([[1, 1], [0, 0]], dtype=np.uint8)
    l, r = nested_rank1_construct(B)
    assert l[1] == 0.0
    assert np.array_equal(round_threshold(np.outer(l, r), 0.5), B)


def test_construct_rejects_non_nested():
    with pytest.raises(ValueError):
        nested_rank1_construct(np.eye(2, dtype=np.uint8))


def test_rrank1_identity_two_blocks():
    ok, (l, r) = rrank1_decide(np.eye(2, dtype=np.uint8))
    assert ok
    assert np.array_equal(round_threshold(np.outer(l, r), 0.5),
                          np.eye(2, dtype=np.uint8))


def test_rrank1_identity_three_is_false():
    ok, witness = rrank1_decide(np.eye(3, dtype=np.uint8))
    assert not ok and witness is None


def test_rrank1_nested_always_true(rng):
    for _ in range(20):
        B = random_staircase(5, 7, 0.5, rng)
        if not B.any():
            continue
        ok, (l, r) = rrank1_decide(B)
        assert ok
        assert np.array_equal(round_threshold(np.outer(l, r), 0.5), B)


def test_rrank1_rejects_zero_matrix():
    with pytest.raises(ValueError):
        rrank1_decide(np.zeros((2, 2), dtype=np.uint8))


@pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (2, 3), (3, 3)])
def test_rrank1_agrees_with_oracle_small(m, n):
    for B in all_binary_matrices(m, n):
        if not B.any():
            continue
        got, witness = rrank1_decide(B)
        assert got == _rrank1_oracle(B), B
        if got:
            l, r = witness
            assert np.array_equal(round_threshold(np.outer(l, r), 0.5), B)


def test_nexhaust_fixed_point_on_nested(rng):
    B = random_staircase(12, 10, 0.5, rng)
    l, r = nested_rank1_construct(B)
    sol = nexhaust(B, l, r)
    assert sol.error == 0
    assert sol.sweeps == 1


def test_nexhaust_single_flip_recovers(rng):
    B = random_staircase(10, 9, 0.5, rng)
    noisy = B.copy()
    noisy[3, 4] ^= 1
    l, r = nested_rank1_construct(B)
    sol = nexhaust(noisy, l, r)
    assert sol.error <= 1


def test_nexhaust_monotone_history(rng):
    B = (rng.random((15, 12)) < 0.5).astype(np.uint8)
    sol = nexhaust(B)
    assert all(a >= b for a, b in zip(sol.history, sol.history[1:]))
    assert np.array_equal(sol.C, round_threshold(np.outer(sol.l, sol.r), 0.5))
    assert sol.l.min() >= 0 and sol.r.min() >= 0
    assert is_nested(sol.C)[0]


def test_nexhaust_zero_row_candidate(rng):
    B = random_staircase(6, 6, 0.5, rng)
    B[2] = 0
    sol = nexhaust(B)
    assert sol.error == 0
    assert not sol.C[2].any()


def test_nexhaust_degenerate_zero_seed():
    B = np.eye(2, dtype=np.uint8)
    sol = nexhaust(B, np.zeros(2), np.zeros(2), max_sweeps=5)
    assert sol.flags  # degenerate update flagged
    assert sol.error <= 2


def test_nexhaust_validates_inputs():
    B = np.eye(2, dtype=np.uint8)
    with pytest.raises(ValueError):
        nexhaust(B, -np.ones(2), np.ones(2))
    with pytest.raises(ValueError):
        nexhaust(B, np.ones(3), np.ones(2))


def test_svd_nested_exact_on_all_ones():
    B = np.ones((4, 7), dtype=np.uint8)
    sol = svd_nested(B)
    assert sol.error == 0


def test_svd_nested_output_is_nested(rng):
    B = (rng.random((10, 14)) < 0.4).astype(np.uint8)
    if not B.any():
        B[0, 0] = 1
    sol = svd_nested(B)
    assert is_nested(sol.C)[0]
    assert sol.l.min() >= 0 and sol.r.min() >= 0


def test_nexhaust_beats_svd_when_seeded_from_it(rng):
    from roundingrank.datagen import add_noise

    B = add_noise(random_staircase(40, 50, 0.4, rng), 0.15, seed=3)
    sv = svd_nested(B)
    nx = nexhaust(B)
    assert nx.error <= sv.error

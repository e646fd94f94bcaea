import numpy as np
import pytest

from roundingrank import hamming_error, round_threshold, rounds_to
from roundingrank.spectral import (nuclear_estimate_rank, svd_estimate_rank,
                                   svd_min_error, trunc_svd_baseline)


def test_svd_rank_one_binary():
    B = np.outer([1, 1, 0, 1], [1, 0, 1]).astype(np.uint8)
    est = svd_estimate_rank(B)
    assert est.value == 1
    assert rounds_to(est.witness, B)


def test_svd_identity_terminates_with_sound_witness():
    B = np.eye(6, dtype=np.uint8)
    est = svd_estimate_rank(B)
    assert 1 <= est.value <= 6
    assert rounds_to(est.witness, B)


def test_svd_upper_triangle_soundness():
    B = np.triu(np.ones((40, 40), dtype=np.uint8))
    est = svd_estimate_rank(B)
    assert rounds_to(est.witness, B)


def test_svd_estimate_random_soundness(rng):
    for _ in range(10):
        B = (rng.random((9, 7)) < rng.uniform(0.2, 0.8)).astype(np.uint8)
        est = svd_estimate_rank(B)
        assert rounds_to(est.witness, B)


def test_svd_min_error_full_rank_is_exact(rng):
    B = (rng.random((6, 8)) < 0.5).astype(np.uint8)
    C, f, errors = svd_min_error(B, 6)
    assert errors[-1] == 0 or errors.min() == 0
    assert hamming_error(B, C) == errors.min()


def test_svd_min_error_all_ones():
    B = np.ones((5, 4), dtype=np.uint8)
    C, f, errors = svd_min_error(B, 1)
    assert errors[0] == 0
    assert hamming_error(B, C) == 0


def test_svd_min_error_reported_error_matches_c(rng):
    B = (rng.random((10, 12)) < 0.35).astype(np.uint8)
    C, f, errors = svd_min_error(B, 4)
    assert hamming_error(B, C) == errors.min()
    assert np.array_equal(f.round(), C)
    # the reported curve matches an independent recomputation per level
    U, S, Vt = np.linalg.svd(B.astype(float), full_matrices=False)
    for ell in range(1, 5):
        approx = (U[:, :ell] * S[:ell]) @ Vt[:ell]
        assert errors[ell - 1] == hamming_error(B, round_threshold(approx, 0.5))


def test_svd_min_error_budget_curve_non_increasing(rng):
    B = (rng.random((12, 9)) < 0.5).astype(np.uint8)
    _, _, errors = svd_min_error(B, 9)
    best_at_budget = np.minimum.accumulate(errors)
    assert (np.diff(best_at_budget) <= 0).all()


def test_trunc_svd_baseline():
    B = np.outer([1, 1, 0], [1, 0, 1, 1]).astype(np.uint8)  # rank 1
    approx, residual = trunc_svd_baseline(B, 1)
    assert residual <= 1e-20
    assert np.allclose(approx, B, atol=1e-12)
    with pytest.raises(ValueError):
        trunc_svd_baseline(B, 0)


def test_trunc_svd_residual_monotone(rng):
    B = (rng.random((8, 10)) < 0.5).astype(np.uint8)
    residuals = [trunc_svd_baseline(B, k)[1] for k in range(1, 9)]
    assert all(a >= b - 1e-15 for a, b in zip(residuals, residuals[1:]))


def test_nuclear_all_ones():
    est = nuclear_estimate_rank(np.ones((4, 6), dtype=np.uint8))
    assert est is not None
    assert est.value == 1
    assert rounds_to(est.witness, np.ones((4, 6), dtype=np.uint8))


def test_nuclear_single_zero_entry():
    B = np.zeros((1, 1), dtype=np.uint8)
    est = nuclear_estimate_rank(B)
    assert est is not None
    assert rounds_to(est.witness, B)


def test_nuclear_identity():
    B = np.eye(3, dtype=np.uint8)
    est = nuclear_estimate_rank(B)
    assert est is not None
    assert est.value <= 3
    assert rounds_to(est.witness, B)


def test_nuclear_post_truncation_never_hurts(rng):
    # every truncation level at or above the returned rank still rounds
    B = (rng.random((6, 6)) < 0.5).astype(np.uint8)
    est = nuclear_estimate_rank(B)
    assert est is not None
    X = est.witness.reconstruct()
    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    for r in range(est.value, len(S) + 1):
        approx = (U[:, :r] * S[:r]) @ Vt[:r]
        assert hamming_error(B, round_threshold(approx, 0.5)) == 0

"""Rounding-rank bounds, decompositions, and nested-matrix approximation.

The rounding rank of a binary matrix is the least rank of a real matrix
that reproduces it entrywise under thresholded rounding.  This package
bundles upper-bound estimators (random projection with per-column LPs,
rounded truncated SVD, logistic PCA, a row-permutation polynomial
construction, and nuclear-norm relaxation), a spectral lower bound,
constructive witness transforms, minimum-error fixed-rank
decompositions, solvers for the closest nested matrix, and a synthetic
data generator with a CLI on top.
"""

from . import bounds, datagen, experiment, lp, lpca, nested, perm, proj, spectral
from . import io  # noqa: F401  (shadows the stdlib name inside the package only)
from .matrix import (Factorization, RankEstimate, as_binary, as_real, density,
                     hamming_error, is_mixed, relative_error, round_threshold,
                     rounds_to, to_sign)

__version__ = "0.1.0"

__all__ = [
    "Factorization", "RankEstimate", "as_binary", "as_real", "density",
    "hamming_error", "is_mixed", "relative_error", "round_threshold",
    "rounds_to", "to_sign", "bounds", "datagen", "experiment", "io", "lp",
    "lpca", "nested", "perm", "proj", "spectral",
]

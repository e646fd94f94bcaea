"""Pure-numpy simplex pivot loop, the fallback for the compiled kernel.

Both kernels run the same Bland-rule pivot sequence on the same tableau
layout; see lp.py for the driver that builds the tableau.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_iterate(T, basis, n_entering, max_iters, tol):
    """Pivot the tableau T in place until optimal, unbounded, or out of budget.

    T has shape (m+1, ncols+1): m constraint rows, then the objective
    row; the right-hand side in the last column.  basis[i] is the basic
    variable of row i.  Entering candidates are restricted to column
    indices below n_entering (this keeps phase-1 artificials out once
    they have left the basis).  Returns (status, iterations).
    """
    m = T.shape[0] - 1
    obj = T[m]
    for it in range(max_iters):
        # Bland: entering variable is the lowest index with negative reduced cost
        neg = np.flatnonzero(obj[:n_entering] < -tol)
        if neg.size == 0:
            return OPTIMAL, it
        q = int(neg[0])
        col = T[:m, q]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios == best]
        if tied.size > 1:
            # Bland tie-break: leave the basic variable with the lowest index
            p = int(tied[np.argmin(basis[tied])])
        else:
            p = int(tied[0])
        _pivot(T, p, q)
        basis[p] = q
    return ITERATION_LIMIT, max_iters


def _pivot(T, p, q):
    T[p] /= T[p, q]
    col = T[:, q].copy()
    col[p] = 0.0
    T -= np.outer(col, T[p])

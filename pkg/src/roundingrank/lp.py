"""Dense linear programs solved by a two-phase simplex with Bland's rule.

The problems this package generates are many and small (a few hundred
constraints, tens of variables), so a dense tableau method with an
anti-cycling rule is a good fit.  The pivot loop lives in a compiled
kernel (roundingrank._simplex) with a numpy fallback; both run the same
pivot sequence.  Set RR_NO_EXT=1 to force the fallback.

Rows whose coefficients all fall below the pivot tolerance are
degenerate: they are either satisfied trivially or reported infeasible
by phase 1.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import _simplex_py

try:
    from . import _simplex as _simplex_c
except ImportError:  # built without Cython
    _simplex_c = None

HAVE_EXTENSION = _simplex_c is not None
_EXT_DEFAULT = HAVE_EXTENSION and not os.environ.get("RR_NO_EXT")

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9

GEQ = 1
LEQ = -1

_REL_FROM_STR = {">=": GEQ, "<=": LEQ}


class LpNumericalError(RuntimeError):
    """Raised when a finished solve fails its own feasibility recheck."""


@dataclass(frozen=True)
class LpProblem:
    """min objective . x  subject to  a[i] . x >= b[i]  or  <= b[i].

    relations holds +1 for >= and -1 for <= (the strings ">=" and "<="
    are accepted and normalized).  nonneg marks variables with lower
    bound 0; unmarked variables are free.  A zero objective turns the
    problem into a pure feasibility check.
    """

    objective: np.ndarray
    a: np.ndarray
    relations: np.ndarray
    b: np.ndarray
    nonneg: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=np.float64))
        c = np.asarray(self.objective, dtype=np.float64).ravel()
        b = np.asarray(self.b, dtype=np.float64).ravel()
        rel = np.asarray(
            [_REL_FROM_STR.get(r, r) for r in np.ravel(self.relations)], dtype=np.int8
        )
        nz = np.asarray(self.nonneg, dtype=bool).ravel()
        if a.shape != (b.size, c.size):
            raise ValueError(f"constraint matrix shape {a.shape} does not match "
                             f"{b.size} rows x {c.size} variables")
        if rel.size != b.size:
            raise ValueError("one relation per constraint row required")
        if not np.isin(rel, (GEQ, LEQ)).all():
            raise ValueError("relations must be '>=' / '<=' (or +1 / -1)")
        if nz.size != c.size:
            raise ValueError("one nonneg flag per variable required")
        if not (np.isfinite(a).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("LP data must be finite")
        for name, value in (("objective", c), ("a", a), ("relations", rel),
                            ("b", b), ("nonneg", nz)):
            object.__setattr__(self, name, value)

    @property
    def n_vars(self):
        return self.objective.size

    @property
    def n_constraints(self):
        return self.b.size


@dataclass
class LpSolution:
    """status is "optimal", "infeasible", "unbounded", or "iteration_limit".

    x and objective are populated only for optimal solves (feasibility
    problems report "optimal" with objective 0).
    """

    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int


def _kernel(use_extension):
    if use_extension is None:
        use_extension = _EXT_DEFAULT
    if use_extension:
        if _simplex_c is None:
            raise RuntimeError("compiled simplex kernel is not available")
        return _simplex_c.simplex_iterate
    return _simplex_py.simplex_iterate


def _set_objective(T, basis, cost):
    T[-1, :-1] = cost
    T[-1, -1] = 0.0
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            T[-1] -= cost[bi] * T[i]


def _drive_out_artificials(T, basis, n_entering):
    """Pivot zero-valued basic artificials out; drop redundant rows."""
    drop = []
    for i in range(len(basis)):
        if basis[i] < n_entering:
            continue
        row = T[i, :n_entering]
        cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        if cand.size:
            _simplex_py._pivot(T, i, int(cand[0]))
            basis[i] = int(cand[0])
        else:
            drop.append(i)
    if drop:
        T = np.delete(T, drop, axis=0)
        basis = np.delete(basis, drop)
    return T, basis


def solve(problem, max_iters=20000, use_extension=None):
    """Solve an LpProblem; deterministic for fixed input.

    max_iters caps the pivots of each simplex phase.  An exhausted
    budget is reported as its own status, never as infeasibility.  Any solution returned as optimal satisfies every
    constraint to within 1e-9 (rechecked; violations raise
    LpNumericalError instead of returning a bad point).
    """
    kern = _kernel(use_extension)
    a = problem.a.copy()
    b = problem.b.copy()
    rel = problem.relations.copy()
    ncon, d = a.shape

    flip = b < 0
    a[flip] *= -1.0
    b[flip] = -b[flip]
    rel[flip] = -rel[flip]

    free_idx = np.flatnonzero(~problem.nonneg)
    nfree = free_idx.size
    n_struct = d + nfree
    n_slack = ncon
    art_rows = np.flatnonzero(rel == GEQ)
    n_art = art_rows.size
    ncols = n_struct + n_slack + n_art
    n_entering = n_struct + n_slack

    T = np.zeros((ncon + 1, ncols + 1))
    T[:ncon, :d] = a
    if nfree:
        T[:ncon, d:n_struct] = -a[:, free_idx]
    slack_cols = n_struct + np.arange(ncon)
    T[np.arange(ncon), slack_cols] = np.where(rel == LEQ, 1.0, -1.0)
    art_cols = n_entering + np.arange(n_art)
    if n_art:
        T[art_rows, art_cols] = 1.0
    T[:ncon, -1] = b

    basis = slack_cols.astype(np.int64)
    basis[art_rows] = art_cols
    total_iters = 0

    if n_art:
        cost1 = np.zeros(ncols)
        cost1[art_cols] = 1.0
        _set_objective(T, basis, cost1)
        status, itn = kern(T, basis, n_entering, max_iters, PIVOT_TOL)
        total_iters += itn
        if status == _simplex_py.ITERATION_LIMIT:
            return LpSolution("iteration_limit", None, None, total_iters)
        if status == _simplex_py.UNBOUNDED:
            raise LpNumericalError("phase-1 objective cannot be unbounded")
        if -T[-1, -1] > 1e-7:
            return LpSolution("infeasible", None, None, total_iters)
        T, basis = _drive_out_artificials(T, basis, n_entering)

    cost2 = np.zeros(T.shape[1] - 1)
    cost2[:d] = problem.objective
    if nfree:
        cost2[d:n_struct] = -problem.objective[free_idx]
    _set_objective(T, basis, cost2)
    status, itn = kern(T, basis, n_entering, max_iters, PIVOT_TOL)
    total_iters += itn
    if status == _simplex_py.ITERATION_LIMIT:
        return LpSolution("iteration_limit", None, None, total_iters)
    if status == _simplex_py.UNBOUNDED:
        return LpSolution("unbounded", None, None, total_iters)

    nrows = T.shape[0] - 1
    xfull = np.zeros(T.shape[1] - 1)
    xfull[basis] = T[:nrows, -1]
    x = xfull[:d].copy()
    if nfree:
        x[free_idx] -= xfull[d:n_struct]

    ax = problem.a @ x
    viol = np.where(problem.relations == GEQ, problem.b - ax, ax - problem.b)
    worst = float(viol.max(initial=0.0))
    if problem.nonneg.any():
        worst = max(worst, float(-(x[problem.nonneg]).min(initial=0.0)))
    if worst > FEAS_TOL:
        raise LpNumericalError(f"solution violates constraints by {worst:.3e}")

    return LpSolution("optimal", x, float(problem.objective @ x), total_iters)

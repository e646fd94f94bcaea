import numpy as np
import pytest

from roundingrank import lp


def _solve(objective, a, relations, b, nonneg=None, **kw):
    d = len(objective)
    if nonneg is None:
        nonneg = [False] * d
    prob = lp.LpProblem(objective=objective, a=a, relations=relations, b=b,
                        nonneg=nonneg)
    return lp.solve(prob, **kw)


def test_infeasible():
    sol = _solve([0.0], [[1.0], [1.0]], [">=", "<="], [1.0, 0.0])
    assert sol.status == "infeasible"


def test_simple_minimum():
    sol = _solve([1.0], [[1.0]], [">="], [3.0])
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(3.0, abs=1e-9)
    assert sol.objective == pytest.approx(3.0, abs=1e-9)


def test_free_variable_negative_optimum():
    sol = _solve([1.0], [[1.0]], [">="], [-5.0])
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(-5.0, abs=1e-9)


def test_unbounded():
    sol = _solve([-1.0], [[1.0]], [">="], [0.0], nonneg=[True])
    assert sol.status == "unbounded"


def test_iteration_limit_status():
    sol = _solve([1.0, 1.0], [[1.0, 2.0], [3.0, 1.0]], [">=", ">="],
                 [4.0, 6.0], nonneg=[True, True], max_iters=1)
    assert sol.status == "iteration_limit"
    assert sol.x is None


def test_known_optimum_by_hand():
    # min x + y  s.t.  x + 2y >= 4, 3x + y >= 6, x, y >= 0
    # corner (8/5, 6/5): objective 14/5
    sol = _solve([1.0, 1.0], [[1.0, 2.0], [3.0, 1.0]], [">=", ">="],
                 [4.0, 6.0], nonneg=[True, True])
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(14 / 5, abs=1e-7)


def test_projection_column_lp_one_dimensional():
    # points {1, -1} with labels {1, 0} at tau = 0.5: find r with
    # r * 1 >= 0.5 + eps and r * (-1) <= 0.5 - eps
    eps = 1e-9
    sol = _solve([0.0], [[1.0], [-1.0]], [">=", "<="], [0.5 + eps, 0.5 - eps])
    assert sol.status == "optimal"
    r = sol.x[0]
    assert r * 1 >= 0.5 + eps - 1e-9
    assert r * -1 <= 0.5 - eps + 1e-9


def test_feasible_point_satisfies_constraints(rng):
    checked = 0
    for trial in range(40):
        m, d = int(rng.integers(2, 10)), int(rng.integers(1, 5))
        a = rng.normal(size=(m, d))
        b = rng.normal(size=m)
        rel = rng.choice([1, -1], size=m)
        if trial % 2:
            # non-negative variables with non-negative costs: bounded below
            nonneg = np.ones(d, dtype=bool)
            c = np.abs(rng.normal(size=d))
        else:
            nonneg = rng.random(d) < 0.5
            c = rng.normal(size=d)
        prob = lp.LpProblem(objective=c, a=a, relations=rel, b=b, nonneg=nonneg)
        sol = lp.solve(prob)
        if sol.status != "optimal":
            continue
        checked += 1
        ax = a @ sol.x
        assert (np.where(rel == 1, b - ax, ax - b) <= 1e-9).all()
        assert (sol.x[nonneg] >= -1e-9).all()
    assert checked > 5


def test_duplicate_row_insensitivity(rng):
    for _ in range(20):
        m, d = int(rng.integers(2, 8)), int(rng.integers(1, 4))
        a = rng.normal(size=(m, d))
        b = rng.normal(size=m)
        rel = rng.choice([1, -1], size=m)
        c = rng.normal(size=d)
        nonneg = np.zeros(d, dtype=bool)
        base = lp.solve(lp.LpProblem(objective=c, a=a, relations=rel, b=b,
                                     nonneg=nonneg))
        dup = lp.solve(lp.LpProblem(objective=c,
                                    a=np.vstack([a, a[:1]]),
                                    relations=np.concatenate([rel, rel[:1]]),
                                    b=np.concatenate([b, b[:1]]),
                                    nonneg=nonneg))
        assert base.status == dup.status
        if base.status == "optimal":
            assert base.objective == pytest.approx(dup.objective, abs=1e-7)


def test_validation_errors():
    with pytest.raises(ValueError):
        lp.LpProblem(objective=[1.0], a=[[1.0, 2.0]], relations=[">="],
                     b=[1.0], nonneg=[False])
    with pytest.raises(ValueError):
        lp.LpProblem(objective=[1.0], a=[[np.inf]], relations=[">="],
                     b=[1.0], nonneg=[False])
    with pytest.raises(ValueError):
        lp.LpProblem(objective=[1.0], a=[[1.0]], relations=["=="],
                     b=[1.0], nonneg=[False])


@pytest.mark.skipif(not lp.HAVE_EXTENSION, reason="compiled kernel not built")
def test_kernels_agree(rng):
    for _ in range(60):
        m, d = int(rng.integers(2, 12)), int(rng.integers(1, 6))
        prob = lp.LpProblem(objective=rng.normal(size=d),
                            a=rng.normal(size=(m, d)),
                            relations=rng.choice([1, -1], size=m),
                            b=rng.normal(size=m),
                            nonneg=rng.random(d) < 0.5)
        s_py = lp.solve(prob, use_extension=False)
        s_cy = lp.solve(prob, use_extension=True)
        assert s_py.status == s_cy.status
        if s_py.status == "optimal":
            assert s_py.objective == pytest.approx(s_cy.objective, abs=1e-7)

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flpf.errors import NumericOverflow
from flpf.lpcore import RationalLP, feasible


def test_simple_max():
    lp = RationalLP()
    lp.add_var("x")
    lp.set_objective({"x": 1})
    lp.add_constraint("cap", {"x": 1}, "<=", 3)
    res = lp.solve()
    assert res.status == "optimal" and res.objective == 3 and res["x"] == 3


def test_infeasible():
    lp = RationalLP()
    lp.add_var("x")
    lp.set_objective({"x": 1})
    lp.add_constraint("lo", {"x": 1}, ">=", 2)
    lp.add_constraint("hi", {"x": 1}, "<=", 1)
    assert lp.solve().status == "infeasible"


def test_two_var_vertex():
    lp = RationalLP()
    lp.add_var("x")
    lp.add_var("y")
    lp.set_objective({"x": 1, "y": 1})
    lp.add_constraint("c1", {"x": 1, "y": 2}, "<=", 4)
    lp.add_constraint("c2", {"x": 3, "y": 1}, "<=", 6)
    res = lp.solve()
    assert res.objective == Fraction(14, 5)
    assert res["x"] == Fraction(8, 5) and res["y"] == Fraction(6, 5)


def test_unbounded():
    lp = RationalLP()
    lp.add_var("x")
    lp.set_objective({"x": 1})
    lp.add_constraint("lo", {"x": 1}, ">=", 1)
    assert lp.solve().status == "unbounded"


def test_min_sense_free_var():
    lp = RationalLP(sense="min")
    lp.add_var("x", nonneg=False)
    lp.add_var("y")
    lp.set_objective({"x": 2, "y": 1})
    lp.add_constraint("e", {"x": 1, "y": 1}, "=", Fraction(1, 2))
    lp.add_constraint("g", {"x": 1}, ">=", -3)
    res = lp.solve()
    assert res.objective == Fraction(-5, 2)
    assert res["x"] == -3 and res["y"] == Fraction(7, 2)


def test_feasible_yes_no():
    lp = RationalLP()
    lp.add_var("x")
    lp.add_constraint("lo", {"x": 1}, ">=", 0)
    lp.add_constraint("hi", {"x": 1}, "<=", 1)
    witness = feasible(lp)
    assert witness is not None and 0 <= witness["x"] <= 1

    lp = RationalLP()
    lp.add_var("x")
    lp.add_constraint("lo", {"x": 1}, ">=", 2)
    lp.add_constraint("hi", {"x": 1}, "<=", 1)
    assert feasible(lp) is None


def test_phi_membership_example(path3, path3_fading):
    # the (5/12, 5/12, 5/12) service point has a per-state decomposition
    from flpf.pooling import attainable

    phi = [Fraction(5, 12)] * 3
    assert attainable(path3, path3_fading, ["a", "b", "c"], phi)
    assert not attainable(
        path3, path3_fading, ["a", "b", "c"], [Fraction(1, 2)] * 3
    )


def test_duplicate_names_rejected():
    lp = RationalLP()
    lp.add_var("x")
    with pytest.raises(ValueError):
        lp.add_var("x")
    lp.add_constraint("c", {"x": 1}, "<=", 1)
    with pytest.raises(ValueError):
        lp.add_constraint("c", {"x": 1}, "<=", 2)


def test_unknown_variable_rejected():
    lp = RationalLP()
    with pytest.raises(KeyError):
        lp.add_constraint("c", {"x": 1}, "<=", 1)


def test_overflow_guard():
    lp = RationalLP(bit_cap=6)
    lp.add_var("x")
    lp.add_var("y")
    lp.set_objective({"x": 1, "y": 1})
    lp.add_constraint("c1", {"x": 997, "y": 991}, "<=", 983)
    lp.add_constraint("c2", {"x": 977, "y": -971}, "<=", 967)
    with pytest.raises(NumericOverflow):
        lp.solve()


def test_dump_mentions_everything():
    lp = RationalLP(sense="min")
    lp.add_var("x", nonneg=False)
    lp.set_objective({"x": Fraction(1, 3)})
    lp.add_constraint("cap", {"x": 2}, "<=", 5)
    text = lp.dump()
    assert "minimize" in text and "cap" in text and "1/3 x" in text and "free: x" in text


def _random_canonical(rng, n, m):
    """max c.x s.t. Ax <= b, x >= 0 with b >= 0 (always feasible at 0)."""
    c = [Fraction(rng.randint(-4, 6)) for _ in range(n)]
    rows = [
        [Fraction(rng.randint(-3, 5)) for _ in range(n)] for _ in range(m)
    ]
    b = [Fraction(rng.randint(0, 8)) for _ in range(m)]
    return c, rows, b


def _solve_canonical(c, rows, b, transpose=False):
    lp = RationalLP("max" if not transpose else "min")
    n = len(c)
    for j in range(n):
        lp.add_var(f"v{j}")
    lp.set_objective({f"v{j}": c[j] for j in range(n)})
    for i, (row, rhs) in enumerate(zip(rows, b)):
        rel = "<=" if not transpose else ">="
        lp.add_constraint(f"r{i}", {f"v{j}": row[j] for j in range(n)}, rel, rhs)
    return lp.solve()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_strong_duality_random(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 4), rng.randint(1, 4)
    c, rows, b = _random_canonical(rng, n, m)
    primal = _solve_canonical(c, rows, b)
    # dual: min b.y s.t. A'y >= c, y >= 0
    cols = [[rows[i][j] for i in range(m)] for j in range(n)]
    dual = _solve_canonical(b, cols, c, transpose=True)
    if primal.status == "optimal":
        assert dual.status == "optimal"
        assert dual.objective == primal.objective
    else:
        assert primal.status == "unbounded"
        assert dual.status == "infeasible"


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_permutation_invariance(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 4), rng.randint(2, 5)
    c, rows, b = _random_canonical(rng, n, m)
    base = _solve_canonical(c, rows, b)
    order = list(range(m))
    rng.shuffle(order)
    shuffled = _solve_canonical(c, [rows[i] for i in order], [b[i] for i in order])
    assert base.status == shuffled.status
    if base.status == "optimal":
        assert base.objective == shuffled.objective

from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from dkgkit.exact_numbers import (DELTA, EPS, EQ, GT, HALF, LT, ONE, RHO, ZERO, ExtReal, combine, compare, ext, ext_max,
                                  ext_min, first_order_div, first_order_mul, parse, solve_interval)

rats = st.fractions(min_value=-10, max_value=10, max_denominator=50)
exts = st.builds(ExtReal, rats, rats, rats, rats)


def test_combine_examples():
    assert combine(EPS, EPS, 1, 1) == 2 * EPS
    assert combine(HALF + EPS, HALF - EPS, 1, 1) == ONE
    x = combine(RHO, DELTA, 1, -3)
    assert x.parts == (0, 1, -3, 0)
    assert x > 0


def test_compare_examples():
    assert compare(DELTA, EPS) == GT
    assert compare(HALF + EPS, HALF) == GT
    assert compare(1 - RHO, 1 - DELTA) == LT
    assert compare(RHO, RHO) == EQ


def test_hierarchy():
    # any rational multiple of a finer infinitesimal loses to the coarser one
    assert RHO > 10 ** 6 * DELTA
    assert DELTA > 10 ** 6 * EPS
    assert EPS > 0
    assert Fr(1, 10 ** 9) > RHO


def test_solve_interval_examples():
    a, c = 1, 1
    lo = 1 - first_order_div(ext(a), 1 + EPS)
    hi = first_order_div(ext(2 * c), 3 + 2 * EPS)
    iv = solve_interval([(1, ">=", lo), (1, "<=", hi)])
    assert iv is not None and iv.lo <= iv.hi
    assert solve_interval([(1, ">=", 2), (1, "<=", 1)]) is None
    s = Fr(3, 4)
    iv = solve_interval([(1, "==", 2 * s - 1)])
    assert iv.lo == iv.hi == HALF


def test_parse_roundtrip():
    assert parse("1/2 + eps") == HALF + EPS
    assert parse("1 - 3*delta + 2*eps") == 1 - 3 * DELTA + 2 * EPS
    for x in (HALF + EPS, 1 - RHO, Fr(-7, 3) + 4 * EPS, ZERO):
        assert parse(str(x)) == x


def test_nonlinear_product_rejected():
    with pytest.raises((ValueError, ArithmeticError)):
        EPS * EPS


def test_first_order_truncation():
    assert first_order_mul(1 + EPS, 1 + EPS) == 1 + 2 * EPS
    assert first_order_div(2 * EPS, 1 + 2 * EPS) == 2 * EPS


@given(exts, exts, exts)
def test_total_order(x, y, z):
    assert sum(map(bool, (x < y, x == y, x > y))) == 1
    if x <= y and y <= z:
        assert x <= z


@given(exts, exts, exts)
def test_order_is_translation_invariant(x, y, z):
    assert (x < y) == (x + z < y + z)


@given(exts, exts, rats, rats)
def test_combine_is_linear(x, y, a, b):
    assert combine(x, y, a, b) == x.scale(a) + y.scale(b)


@given(exts, exts)
def test_min_max(x, y):
    assert ext_min(x, y) <= ext_max(x, y)
    assert {ext_min(x, y), ext_max(x, y)} == {x, y}


@given(st.lists(st.tuples(st.sampled_from([1, -1, 2, Fr(1, 3)]), st.sampled_from(["<=", ">="]), exts),
                min_size=1, max_size=6))
def test_interval_satisfies_all_constraints(cons):
    iv = solve_interval(cons)
    if iv is None:
        return
    t = iv.pick()
    for c, op, r in cons:
        lhs = t.scale(c)
        assert (lhs <= r) if op == "<=" else (lhs >= r)

from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import region_policy as rp
from dkgkit.exact_numbers import EPS, HALF, ext

F = Fr


def test_admissible_examples():
    assert rp.admissible(F(1, 10), F(6, 10)).admissible
    assert rp.admissible(F(6, 10), F(16, 10)).admissible            # r = 1 + s allowance
    v = rp.admissible(F(1, 10), F(1, 2))
    assert not v.admissible and "r > 1/2 + s/3" in v.failing_constraints


def test_classify_examples():
    assert rp.classify(F(1, 4), F(8, 10)) == "R2"
    assert rp.classify(F(1, 2), F(5, 4)) == "BD"
    assert rp.classify(F(1, 2), F(1)) == "R3"
    assert rp.classify_full(F(1, 2), F(1)).piece == "D"
    assert rp.classify(F(1, 4), F(3)) == "Inadmissible"


def test_choose_parameters_examples():
    assert rp.choose_parameters(F(1, 4), F(8, 10)) == (ext(F(3, 4)), HALF + EPS)
    assert rp.choose_parameters(F(1, 2), F(5, 4))[0] == 1 - EPS
    assert rp.choose_parameters(2, F(5, 2))[0] == ext(F(3, 4))
    with pytest.raises(ValueError):
        rp.choose_parameters(F(1, 4), F(3))


def test_necessary_condition_examples():
    assert rp.necessary_conditions(0, 0, 0, 0, 0, 0) == ["cond1", "cond2", "cond3"]
    # cond1 of the KG instantiation is r <= 1/2 + 2s
    s = F(1, 4)
    assert "cond1" not in rp.violated_for_point(s, F(1))["kg"]
    assert "cond1" in rp.violated_for_point(s, F(1) + F(1, 100))["kg"]
    # the dual Dirac instantiation needs r >= s
    assert "cond5" in rp.violated_for_point(F(3, 2), F(7, 5))["dirac"]


def test_vertex_pieces_by_s():
    for name in ("R1", "R2"):
        assert all(s <= HALF.q for s, _ in rp.polygons()[name])
    for name in ("R3", "R4"):
        assert all(HALF.q <= s <= 1 for s, _ in rp.polygons()[name])


def test_polygons_csv_header():
    lines = rp.polygons_csv().splitlines()
    assert lines[0] == "polygon,index,s,r"
    assert any(ln.startswith("Exterior,") for ln in lines)


points = st.tuples(st.fractions(0, 3, max_denominator=60), st.fractions(0, 4, max_denominator=60))


@settings(max_examples=500)
@given(points)
def test_labels_agree_with_admissibility(p):
    s, r = p
    v = rp.classify_full(s, r)
    assert (v.region == "Inadmissible") == (not rp.admissible(s, r).admissible)
    if v.admissible:
        assert v.region in rp.REGIONS[:-1]
        sig = v.sigma.evaluate(eps=Fr(1, 1000))
        assert Fr(1, 2) < sig < 1


@settings(max_examples=300)
@given(points)
def test_strict_violation_is_flagged(p):
    s, r = p
    if s > 0 and r > F(1, 2) + 2 * s:
        assert rp.violated_for_point(s, r)["kg"]

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import embedding_engine as ee
from dkgkit.embedding_engine import EmbeddingFact, emb
from dkgkit.exact_numbers import EPS, HALF, ext, first_order_div

s_, r_ = F(1, 3), F(9, 10)


# ---- base product laws

def test_sobolev_law():
    d = HALF + EPS
    assert ee.check_sobolev_product(1 + EPS, 0, 0, d)
    assert ee.check_sobolev_product(HALF, HALF, 0, d)
    assert not ee.check_sobolev_product(F(1, 4), F(1, 4), 0, d)
    with pytest.raises(ValueError):
        ee.check_sobolev_product(1, 1, 0, HALF)


def test_wave_law():
    assert ee.check_wave_product(1, 0, 1, F(3, 5), F(3, 5), 0)
    assert not ee.check_wave_product(F(3, 2), 0, 0, F(3, 5), F(3, 5), 0)
    assert ee.check_wave_product(HALF + EPS, HALF - EPS, HALF, HALF + EPS, 0, 0)


def test_special_law():
    assert ee.check_special(emb((HALF + EPS, HALF + EPS), (EPS, F(3, 5)), (-1 + EPS, HALF)))
    assert not ee.check_special(emb((HALF + EPS, HALF + EPS), (EPS, F(3, 5)), (-1 + EPS, HALF + EPS)))
    assert ee.check_special(emb((HALF + 2 * EPS, HALF + EPS), (2 * EPS, F(3, 5)), (-1 + 2 * EPS, HALF)))


# ---- rules

def test_dualize_example():
    sig = ext(F(3, 4))
    base = emb((1 + s_ - r_, 0), (HALF + s_ - 3 * EPS, sig), (0, -HALF - EPS))
    f = EmbeddingFact(base, "axiom")
    d = ee.dualize(f)
    assert d.statement == emb((0, HALF + EPS), (HALF + s_ - 3 * EPS, sig), (-1 - s_ + r_, 0))
    assert ee.dualize(d).statement == base


def test_interpolate_example_and_endpoints():
    d = HALF + EPS
    f0 = ee.prove_base(emb((1 + EPS, d), (0, d), (0, 0)))
    f1 = ee.prove_base(emb((0, d), (1 + EPS, d), (0, 0)))
    th = F(1, 3)
    fi = ee.interpolate(f0, f1, th)
    assert fi.statement == emb(((1 + EPS).scale(1 - th), d), ((1 + EPS).scale(th), d), (0, 0))
    assert ee.interpolate(f0, f1, 0).statement == f0.statement
    assert ee.interpolate(f0, f1, 1).statement == f1.statement
    with pytest.raises(ValueError):
        ee.interpolate(f0, f1, F(3, 2))


def test_weaken_refuses_stronger_claims():
    f = ee.prove_base(emb((1 + EPS, HALF + EPS), (0, HALF + EPS), (0, 0)))
    with pytest.raises(ValueError):
        ee.weaken(f, emb((1, HALF + EPS), (0, HALF + EPS), (0, 0)))


def test_verify_catches_tampering():
    f = ee.prove_base(emb((1 + EPS, HALF + EPS), (0, HALF + EPS), (0, 0)))
    assert ee.verify(f)
    bad = EmbeddingFact(emb((F(1, 4), HALF + EPS), (F(1, 4), HALF + EPS), (0, 0)), f.rule, data=f.data)
    assert not ee.verify(bad)


# ---- interpolated estimates

BIE_TRUE = {
    "1": dict(a=1, alpha=F(1, 2), c=F(1, 2)),
    "1e": dict(a=F(1, 2), alpha=F(1, 2), c=F(3, 4)),
    "2": dict(a=F(3, 2), alpha=F(1, 4), beta=F(1, 2), gamma=F(1, 2)),
    "3": dict(a=F(1, 2), b=F(1, 2), beta=F(1, 4), c=F(1, 2)),
    "4": dict(beta=F(1, 4), c=F(1, 2)),
    "5": dict(a=F(1, 2), alpha=F(1, 2), b=F(1, 2), c=F(3, 4)),
    "6": dict(a=F(1, 2), b=F(3, 4), beta=F(3, 4)),
    "7": dict(a=F(1, 2), beta=F(3, 4)),
    "8": dict(a=HALF + EPS, beta=HALF + EPS, gamma=HALF, e=F(1, 4)),
    "9": dict(beta=F(1, 4), c=F(1)),
}

BIE_FALSE = {
    "1": dict(a=0, alpha=F(1, 2), c=F(1, 2)),
    "1e": dict(a=F(1, 2), alpha=F(1, 2), c=F(1, 2)),
    "2": dict(a=1, alpha=F(1, 4), beta=F(1, 2), gamma=F(1, 2)),
    "3": dict(a=F(1, 2), b=F(1, 3), beta=F(1, 4), c=F(1, 2)),
    "4": dict(beta=F(1, 4), c=F(1, 4)),
    "5": dict(a=0, alpha=0, b=F(1, 2), c=F(3, 4)),
    "6": dict(a=F(1, 2), b=F(1, 2), beta=F(1, 2)),
    "7": dict(a=F(1, 2), beta=F(1, 2)),
    "8": dict(a=0, beta=0, gamma=F(1, 2), e=F(1, 4)),
    "9": dict(beta=F(1, 4), c=F(1, 2)),
}


@pytest.mark.parametrize("k", ee.BIE_IDS)
def test_bie_tables(k):
    ok, fact = ee.derive_bie(k, BIE_TRUE[k])
    assert ok and fact is not None and ee.verify(fact)
    assert fact.statement == ee.bie_statement(k, BIE_TRUE[k])
    assert ee.derive_bie(k, BIE_FALSE[k]) == (False, None)


def test_bie8_uses_special_law():
    _, fact = ee.derive_bie("8", BIE_TRUE["8"])
    assert "special-product" in {leaf.rule for leaf in fact.leaves()}


def test_explicit_theta_choices():
    iv, fact = ee.sobolev_case2_interpolation(F(1, 5))
    assert iv.lo == iv.hi == ext(F(2, 5)) and ee.verify(fact)
    iv = ee.bie9_inner_interval()
    assert iv.contains(first_order_div(2 * EPS, 1 + 2 * EPS))


@settings(max_examples=60, deadline=None)
@given(st.fractions(0, 3, max_denominator=12), st.fractions(0, 1, max_denominator=12))
def test_bie1_condition_matches_closed_form(a, c):
    al = F(1, 2)
    ok, fact = ee.derive_bie("1", dict(a=a, alpha=al, c=c))
    assert ok == (3 * min(a / 2, al) + c > F(3, 2))
    if ok:
        assert fact is not None and ee.verify(fact)


# ---- case audit

def test_audit_examples():
    rep = ee.audit_case("I+1", F(1, 4), F(4, 5))
    assert rep.proven and rep.sigma == ext(F(3, 4))
    assert rep.required == emb((F(9, 20), F(3, 4)), (F(3, 4) - 2 * EPS, F(3, 4)), (0, 0))
    s, rho = F(1, 4), F(1, 50)
    rep = ee.audit_case("J+1", s, HALF.q + s / 3 + rho)
    assert rep.proven and rep.route == "bie3"
    assert rep.required == emb((HALF + s, HALF + s / 3), (HALF - s, HALF - s / 3 - EPS), (-s / 3 - rho, 0))
    rep = ee.audit_case("J−2", F(3, 4), F(13, 10))
    assert rep.proven and rep.region == "R4"
    assert rep.required == emb((F(13, 10), HALF + EPS), (HALF, F(1, 4) - 5 * EPS), (0, 0))


def test_audit_errors():
    with pytest.raises(ValueError):
        ee.audit_case("K+1", F(1, 4), F(4, 5))
    with pytest.raises(ValueError):
        ee.audit_case("I+1", F(1, 4), F(3))


def test_proven_reports_reverify():
    for rep in ee.audit_point(F(3, 4), F(6, 5)):
        assert rep.proven, rep.detail
        assert ee.verify(rep.derivation)


def test_exterior_diagonal_is_reported_failed():
    # the J+3 route does not close on r = s (see the decisions ledger)
    rep = ee.audit_case("J+3", F(5, 4), F(5, 4))
    assert rep.verdict == "failed" and rep.detail


exts = st.builds(lambda a, b: (ext(a), ext(b)), st.fractions(-2, 2, max_denominator=8),
                 st.fractions(-2, 2, max_denominator=8))


@given(exts, exts, exts, st.sampled_from([0, 1]))
def test_duality_is_an_involution(x, y, z, which):
    e = emb(x, y, z)
    f = EmbeddingFact(e, "axiom")
    assert ee.dualize(ee.dualize(f, which), which).statement == e
    assert ee.implies(e, e)

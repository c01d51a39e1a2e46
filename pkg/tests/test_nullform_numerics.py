import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import nullform_numerics as nf


def test_collinear_example():
    g, th, sp, sm, kp, km, thp, thm = nf.derived_quantities(
        nf.FrequencyPoint(2.0, np.array([2.0, 0, 0]), 0.0, np.array([1.0, 0, 0])))
    assert (kp, km) == (2.0, 0.0)
    assert g == 0.0                      # tau = |xi|
    assert thp == pytest.approx(np.pi) and thm == 0.0


def test_degenerate_direction_rejected():
    with pytest.raises(ValueError):
        nf.derived_quantities(nf.FrequencyPoint(0.0, np.array([1.0, 0, 0]), 0.0, np.array([1.0, 0, 0])))


def test_stable_angle_small():
    u = np.array([[1.0, 0, 0]])
    v = np.array([[1.0, 1e-10, 0]])
    assert nf.stable_angle(u, v)[0] == pytest.approx(1e-10, rel=1e-6)


def test_empty_sample():
    assert nf.check_exact_bounds(0, seed=0) == 0


def test_adversarial_points_clean():
    assert nf._violations(*nf.adversarial_points()) == 0


def test_orthogonal_configuration_in_bracket():
    eta = np.array([[1.0, 0, 0]])
    zeta = np.array([[0, 1.0, 0]])
    xi = eta - zeta
    c = np.linalg.norm(xi)
    ratios, ok = nf.comparability_ratios(np.array([c]), xi, np.array([-1.0]), eta)
    for k, v in ratios.items():
        if v.size:
            assert nf.BRACKET[0] <= v[0] <= nf.BRACKET[1], k


def test_null_symbol_antiparallel_finite():
    eta = np.array([[1.0, 0, 0]])
    sym = nf.da.opnorm(nf.da.null_symbol(eta, -eta, (1, -1)))
    assert np.isfinite(sym).all() and sym[0] <= nf.SYMBOL_CONSTANT * np.pi


def test_null_symbol_stable_across_seeds():
    cs = [nf.check_null_symbol_bound(20_000, seed=s)["constant"] for s in (0, 1, 2)]
    assert max(cs) <= nf.SYMBOL_CONSTANT
    assert (max(cs) - min(cs)) / max(cs) < 0.01


def test_results_csv_shape():
    text = nf.results_csv(2000, 0, 1000, [0], 1000, 0)
    rows = text.splitlines()
    assert rows[0].startswith("relation,max_ratio")
    assert all(r.split(",")[3] == "0" for r in rows[1:])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_exact_bounds_any_seed(seed):
    assert nf.check_exact_bounds(5000, seed, include_adversarial=False) == 0


@settings(max_examples=100)
@given(st.lists(st.floats(-50, 50), min_size=8, max_size=8))
def test_kappa_bounds_pointwise(v):
    tau, lam = v[0], v[1]
    xi, eta = np.array(v[2:5]), np.array(v[5:8])
    if np.linalg.norm(eta) < 1e-3 or np.linalg.norm(eta - xi) < 1e-3:
        return
    g, th, sp, sm, kp, km, _, _ = nf.derived_quantities(nf.FrequencyPoint(tau, xi, lam, eta))
    mn = min(np.linalg.norm(eta), np.linalg.norm(eta - xi))
    tol = 1e-9 * (1 + abs(tau) + abs(lam) + 2 * mn + np.linalg.norm(xi))
    assert 0 <= kp <= 2 * mn + tol and 0 <= km <= 2 * mn + tol
    assert kp <= abs(g) + abs(th) + abs(sp) + tol
    assert km <= abs(g) + abs(th) + abs(sm) + tol

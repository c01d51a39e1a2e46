import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import dirac_algebra as da

I4 = np.eye(4)
vec = st.tuples(*[st.floats(-10, 10, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_block_identities_exact():
    beta, alpha = da.dirac_matrices()
    assert np.abs(beta @ beta - I4).max() < 1e-14
    for a in alpha:
        assert np.abs(a @ a - I4).max() < 1e-14
        assert np.abs(a @ beta + beta @ a).max() < 1e-14
        assert np.abs(a - a.conj().T).max() == 0
    assert np.abs(beta - beta.conj().T).max() == 0


def test_projection_examples():
    e1 = np.array([1.0, 0, 0])
    assert np.allclose(da.projection(e1, 1), 0.5 * (I4 + da.ALPHA[0]))
    with pytest.raises(ValueError):
        da.projection(np.zeros(3), 1)


def test_eigenvector_examples():
    assert np.allclose(da.eigenvector(np.array([1.0, 0, 0]), 1), [1, 0, 0, 1])
    assert np.allclose(da.eigenvector(np.array([0, 0, 1.0]), 1), [1, 0, 1, 0])


def test_beta_pairing_examples():
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert abs(da.beta_pairing(e1, e1)) < 1e-15
    assert abs(da.beta_pairing(e1, e2) - (1 + 1j)) < 1e-15
    assert abs(da.beta_pairing_matrix(e1, e2) - (1 + 1j)) < 1e-13


def test_beta_pairing_planar_imaginary_part():
    rng = np.random.default_rng(3)
    ph = rng.uniform(0, 2 * np.pi, (1000, 2))
    eta = np.stack([np.cos(ph[:, 0]), np.sin(ph[:, 0]), np.zeros(1000)], 1)
    zeta = np.stack([np.cos(ph[:, 1]), np.sin(ph[:, 1]), np.zeros(1000)], 1)
    im = np.imag(da.beta_pairing(eta, zeta))
    assert np.abs(np.abs(im) - np.abs(np.sin(ph[:, 1] - ph[:, 0]))).max() < 1e-12


def test_angles():
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert da.angle(e1, e2) == pytest.approx(np.pi / 2)
    assert da.angle(e1, e1) == 0
    assert da.angle(e1, -e1) == pytest.approx(np.pi)


def test_null_symbol_aligned_and_antiparallel():
    e1 = np.array([1.0, 0, 0])
    assert np.abs(da.null_symbol(e1, e1, (1, 1))).max() < 1e-15
    anti = da.opnorm(da.null_symbol(e1, -e1, (1, 1)))
    assert anti <= 4 * np.pi


def test_battery_fixed_seed():
    res = da.identity_battery(1000, seed=0)
    assert max(res.values()) < 1e-12


@settings(max_examples=200)
@given(vec, st.sampled_from([1, -1]))
def test_projection_algebra(xi, sign):
    xi = np.asarray(xi)
    p, q = da.projection(xi, sign), da.projection(xi, -sign)
    assert np.abs(p @ p - p).max() < 1e-12
    assert np.abs(p @ q).max() < 1e-12
    assert np.abs(p + q - I4).max() < 1e-12
    v = da.eigenvector(xi, sign)
    assert np.abs(p @ v - v).max() < 1e-12


@settings(max_examples=200)
@given(vec, st.floats(0.01, 100), st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]))
def test_null_symbol_vanishes_when_aligned(eta, scale, signs):
    eta = np.asarray(eta)
    s1, s2 = signs
    zeta = s1 * s2 * scale * eta    # s1 eta and s2 zeta point the same way
    assert np.abs(da.null_symbol(eta, zeta, signs)).max() < 1e-12

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import dkg_solver as ds
from dkgkit.dirac_algebra import eigenvector
from dkgkit.embedding_engine import emb


@pytest.fixture(scope="module")
def grid():
    return ds.Grid(16)


def rand_spinor(grid, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((4,) + grid.kabs.shape) + 1j * rng.standard_normal((4,) + grid.kabs.shape)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        ds.Grid(12)


def test_fourier_roundtrip(grid):
    u = rand_spinor(grid, 0)
    assert np.abs(grid.ifft(grid.fft(u)) - u).max() < 1e-12


def test_split_plane_wave(grid):
    xi = np.array([1.0, 2.0, -1.0])
    phase = np.exp(1j * np.tensordot(xi, grid.x, axes=1))
    psi = eigenvector(xi, 1)[:, None, None, None] * phase
    pp, pm = ds.split_spinor(grid, psi)
    assert np.abs(pp - psi).max() < 1e-12 and np.abs(pm).max() < 1e-12


def test_split_random_field(grid):
    psi = rand_spinor(grid, 1)
    psi -= psi.mean(axis=(1, 2, 3), keepdims=True)   # P+(0) = P-(0) = I/2 overlap at the zero mode
    pp, pm = ds.split_spinor(grid, psi)
    assert np.abs(pp + pm - psi).max() < 1e-12
    inner = np.vdot(pp, pm) * grid.dx ** 3
    assert abs(inner) < 1e-10 * np.vdot(psi, psi).real * grid.dx ** 3
    z = ds.split_spinor(grid, np.zeros_like(psi))
    assert not np.any(z[0]) and not np.any(z[1])


def test_free_propagation(grid):
    xi = np.array([2.0, 0, 1.0])
    k = np.linalg.norm(xi)
    phase = np.exp(1j * np.tensordot(xi, grid.x, axes=1))
    psi = eigenvector(xi, 1)[:, None, None, None] * phase
    zero = np.zeros(grid.kabs.shape)
    st0 = ds.make_state(ds.Grid(16, dealias=False), psi, zero, zero)
    st1 = ds.free_propagate(grid, st0, 1.0)
    assert np.abs(grid.ifft(st1.psi_p) - np.exp(-1j * k) * psi).max() < 1e-12
    # zero mode of phi grows linearly
    st0 = ds.make_state(grid, np.zeros_like(psi), zero + 0.5, zero + 2.0)
    st1 = ds.free_propagate(grid, st0, 0.75)
    assert np.abs(grid.ifft(st1.phi) - (0.5 + 0.75 * 2.0)).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_free_semigroup(t1, t2):
    g = ds.Grid(8)
    rng = np.random.default_rng(5)
    st0 = ds.State(*(rng.standard_normal(s) + 0j for s in ((4, 8, 8, 8), (4, 8, 8, 8), (8, 8, 8), (8, 8, 8))))
    a = ds.free_propagate(g, ds.free_propagate(g, st0, t1), t2)
    b = ds.free_propagate(g, st0, t1 + t2)
    for x, y in zip((a.psi_p, a.psi_m, a.phi, a.phi_t), (b.psi_p, b.psi_m, b.phi, b.phi_t)):
        assert np.abs(x - y).max() < 1e-11 * (1 + np.abs(y).max())


def test_zero_data_is_fixed(grid):
    z = np.zeros(grid.kabs.shape)
    st0 = ds.make_state(grid, np.zeros((4,) + z.shape), z, z)
    st1 = ds.step(grid, st0, 0.1)
    assert all(not np.any(x) for x in (st1.psi_p, st1.psi_m, st1.phi, st1.phi_t))
    with pytest.raises(ValueError):
        ds.step(grid, st0, 0.0)


def test_beta_form_is_real(grid):
    psi = rand_spinor(grid, 2)
    assert np.abs(ds.beta_form(psi).imag).max() < 1e-12


def test_nan_aborts(grid):
    z = np.zeros(grid.kabs.shape)
    st0 = ds.make_state(grid, np.zeros((4,) + z.shape), z, z)
    st0.phi[0, 0, 0] = np.nan
    with pytest.raises(ds.SolverAbort):
        ds.step(grid, st0, 0.1)


def test_free_charge_exact():
    cfg = ds.SolverConfig(N=16, dt=1 / 32, T=1.0, coupling=0.0,
                          data={"preset": "random-band-limited", "seed": 3})
    _, ser = ds.run(cfg)
    c = ser["charge"]
    assert np.abs(c - c[0]).max() / c[0] < 1e-13


def test_coupled_small_run_invariants():
    cfg = ds.SolverConfig(N=16, dt=1 / 64, T=0.5, data={"preset": "gaussian", "amplitude": 1.0})
    _, ser = ds.run(cfg)
    c = ser["charge"]
    assert np.abs(c - c[0]).max() / c[0] < 1e-9
    assert ser["phi_imag"].max() < 1e-10 and ser["beta_form_imag"].max() < 1e-10


def test_plane_wave_preset_conserves_charge():
    cfg = ds.SolverConfig(N=16, dt=1 / 16, T=0.5, data={"preset": "plane-wave", "mode": [1, 1, 0]})
    _, ser = ds.run(cfg)
    assert ser["charge"][-1] == pytest.approx(ser["charge"][0], rel=1e-12)


def test_temporal_order():
    errs, orders = ds.temporal_order(ds.SolverConfig(N=8, T=0.5, data={"preset": "gaussian", "amplitude": 2.0}))
    assert np.all(orders >= 3.5), orders


def test_config_validation():
    with pytest.raises(ValueError):
        ds.SolverConfig(dt=-1).validate()
    with pytest.raises(ValueError):
        ds.SolverConfig(N=24).validate()
    with pytest.raises(ValueError):
        ds.SolverConfig(data={"preset": "soliton"}).validate()
    with pytest.raises(ValueError):
        ds.initial_data(ds.Grid(8), {"preset": "gaussian", "colour": 1})


# ---- spacetime norms

def test_parseval():
    rng = np.random.default_rng(0)
    u = rng.standard_normal((8, 4, 4, 4)) + 1j * rng.standard_normal((8, 4, 4, 4))
    assert abs(ds.spacetime_norm(u, 0, 0, "H", taper="none") - ds.direct_l2(u)) < 1e-10
    for v in ("H", "Xplus", "Xminus"):
        assert abs(ds.spacetime_norm(u, 0, 0, v) - ds.direct_l2(u, taper="raised-cosine")) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(-2, 2), st.floats(0, 2), st.sampled_from(["Xplus", "Xminus"]))
def test_h_below_x(seed, a, b, variant):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((8, 4, 4, 4)) + 1j * rng.standard_normal((8, 4, 4, 4))
    assert ds.spacetime_norm(u, a, b, "H") <= ds.spacetime_norm(u, a, b, variant) * (1 + 1e-12)


def test_free_wave_sits_on_its_cone():
    w = ds.free_wave_array(8, 32, (1, 0, 0), T=2 * np.pi)
    T = 2 * np.pi
    plus = [ds.spacetime_norm(w, 0, b, "Xplus", T) for b in (0, 1)]
    minus = [ds.spacetime_norm(w, 0, b, "Xminus", T) for b in (0, 1)]
    assert plus[1] < minus[1]
    assert plus[0] == pytest.approx(minus[0])


def test_empirical_embedding_controls():
    true = emb((0, 0), (0, 0), (0, 0))
    proven = emb((1, F(3, 5)), (1, F(3, 5)), (0, 0))
    false = emb((0, 0), (0, 0), (2, 2))
    q = {e: [ds.empirical_embedding_check(e, trials=4, N=n, Nt=2 * n) for n in (8, 16)] for e in (true, proven, false)}
    assert np.isfinite(q[true]).all()
    assert q[proven][1] < 2 * q[proven][0]
    assert q[false][1] >= 4 * q[false][0]


def test_snapshot_roundtrip(tmp_path):
    a = (np.arange(24) + 1j).reshape(2, 3, 4)
    ds.save_array(tmp_path / "a.bin", a)
    b = ds.load_array(tmp_path / "a.bin")
    assert b.shape == a.shape and np.array_equal(a, b)
    raw = (tmp_path / "a.bin").read_bytes()
    assert raw[:4] == b"DKGA" and b"<c16" in raw[:40]

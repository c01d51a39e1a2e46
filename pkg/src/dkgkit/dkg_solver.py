"""Pseudo-spectral solver for the massless Dirac-Klein-Gordon system on a periodic box.

Half-wave form, with D_t = -i d/dt:
    d/dt psi_pm = -+ i|D| psi_pm + i P_pm(D)(phi beta psi),   psi = psi_+ + psi_-
    phi_tt      = Laplace(phi) + <beta psi, psi>
Time stepping is integrating-factor RK4: the free flow is applied exactly in
Fourier space and only the quadratic terms are integrated numerically.
The torus [0, box)^3 stands in for R^3.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from .dirac_algebra import BETA, eigenvector

DTYPE = np.complex128


class SolverAbort(RuntimeError):
    """Raised when a run produces non-finite values."""


# --------------------------------------------------------------------------
# grid and Fourier helpers


class Grid:
    def __init__(self, N: int, box: float = 2 * np.pi, dealias: bool = True):
        if N < 2 or N & (N - 1):
            raise ValueError("N must be a power of two")
        self.N, self.box, self.dealias = N, float(box), dealias
        k1 = 2 * np.pi / self.box * np.fft.fftfreq(N, 1.0 / N)
        self.k = np.stack(np.meshgrid(k1, k1, k1, indexing="ij"))          # (3, N, N, N)
        self.kabs = np.sqrt(np.sum(self.k ** 2, axis=0))
        with np.errstate(invalid="ignore", divide="ignore"):
            self.khat = np.where(self.kabs > 0, self.k / self.kabs, 0.0)     # zero mode: khat = 0
        idx = np.abs(np.fft.fftfreq(N, 1.0 / N))
        keep1 = idx < N / 3.0
        self.mask = (keep1[:, None, None] & keep1[None, :, None] & keep1[None, None, :]) if dealias \
            else np.ones((N, N, N), bool)
        self.dx = self.box / N
        x1 = self.dx * np.arange(N)
        self.x = np.stack(np.meshgrid(x1, x1, x1, indexing="ij"))

    # transforms over the last three axes
    def fft(self, u):
        return np.fft.fftn(u, axes=(-3, -2, -1))

    def ifft(self, u):
        return np.fft.ifftn(u, axes=(-3, -2, -1))

    def l2sq_hat(self, uhat, weight=None):
        """Continuum L^2 norm squared from Fourier coefficients (discrete Parseval)."""
        w = 1.0 if weight is None else weight
        return float(np.sum(np.abs(uhat) ** 2 * w) * self.dx ** 3 / self.N ** 3)

    def sobolev(self, uhat, s):
        return np.sqrt(self.l2sq_hat(uhat, (1 + self.kabs ** 2) ** s))


def alpha_dot_apply(khat, u):
    """(khat . alpha) u for spinor arrays u of shape (4, ...)."""
    k1, k2, k3 = khat
    up, lo = u[:2], u[2:]

    def sig(v):
        return np.stack([k3 * v[0] + (k1 - 1j * k2) * v[1], (k1 + 1j * k2) * v[0] - k3 * v[1]])
    return np.concatenate([sig(lo), sig(up)])


def project(grid: Grid, uhat, sign):
    """P_sign(xi) applied modewise; P_pm(0) = I/2."""
    return 0.5 * (uhat + sign * alpha_dot_apply(grid.khat, uhat))


def beta_apply(u):
    return np.concatenate([u[:2], -u[2:]])


def beta_form(psi):
    """<beta psi, psi> = psi^* beta psi pointwise (real up to rounding)."""
    return np.sum(np.conj(psi) * beta_apply(psi), axis=0)


# --------------------------------------------------------------------------
# state


@dataclass
class State:
    psi_p: np.ndarray     # Fourier side, (4, N, N, N)
    psi_m: np.ndarray
    phi: np.ndarray       # Fourier side, (N, N, N)
    phi_t: np.ndarray

    def copy(self):
        return State(self.psi_p.copy(), self.psi_m.copy(), self.phi.copy(), self.phi_t.copy())

    def axpy(self, h, other: "State") -> "State":
        return State(self.psi_p + h * other.psi_p, self.psi_m + h * other.psi_m,
                     self.phi + h * other.phi, self.phi_t + h * other.phi_t)


def split_spinor(grid: Grid, psi):
    """Physical spinor field (4, N, N, N) -> (psi_+, psi_-) in physical space."""
    ph = grid.fft(np.asarray(psi, DTYPE))
    return grid.ifft(project(grid, ph, 1)), grid.ifft(project(grid, ph, -1))


def make_state(grid: Grid, psi, phi, phi_t) -> State:
    ph = grid.fft(np.asarray(psi, DTYPE))
    m = grid.mask
    return State(project(grid, ph, 1) * m, project(grid, ph, -1) * m,
                 grid.fft(np.asarray(phi, DTYPE)) * m, grid.fft(np.asarray(phi_t, DTYPE)) * m)


def _factors(grid: Grid, t: float):
    cache = grid.__dict__.setdefault("_prop", {})
    if t not in cache:
        k = grid.kabs
        cache[t] = (np.exp(-1j * t * k), np.exp(1j * t * k), np.cos(t * k), np.sin(t * k) * k,
                    t * np.sinc(t * k / np.pi))      # sin(tk)/k with the k -> 0 limit t
        if len(cache) > 8:
            cache.pop(next(iter(cache)))
    return cache[t]


def free_propagate(grid: Grid, st: State, t: float) -> State:
    """Exact free flow over time t (half-waves rotate, the wave part is a 2x2 rotation)."""
    ep, em, c, ks, sinc = _factors(grid, t)
    return State(st.psi_p * ep, st.psi_m * em,
                 c * st.phi + sinc * st.phi_t, -ks * st.phi + c * st.phi_t)


def nonlinear(grid: Grid, st: State, coupling: float = 1.0) -> State:
    """Quadratic terms, products in physical space, 2/3-rule filtered."""
    psi = grid.ifft(st.psi_p + st.psi_m)
    phi = grid.ifft(st.phi).real
    f = grid.fft(phi * beta_apply(psi)) * grid.mask
    q = grid.fft(beta_form(psi).real) * grid.mask
    af = alpha_dot_apply(grid.khat, f)
    g = 0.5j * coupling
    return State(g * (f + af), g * (f - af), np.zeros_like(st.phi), coupling * q)


def step(grid: Grid, st: State, h: float, coupling: float = 1.0) -> State:
    """One integrating-factor RK4 step."""
    if h <= 0:
        raise ValueError("step size must be positive")
    with np.errstate(over="ignore", invalid="ignore"):    # blow-up is caught below
        E2 = lambda u: free_propagate(grid, u, h / 2)
        E = lambda u: free_propagate(grid, u, h)
        a = nonlinear(grid, st, coupling)
        ua = E2(st.axpy(h / 2, a))
        b = nonlinear(grid, ua, coupling)
        e2u = E2(st)
        ub = e2u.axpy(h / 2, b)
        c = nonlinear(grid, ub, coupling)
        uc = E(st).axpy(h, E2(c))
        d = nonlinear(grid, uc, coupling)
        bc = E2(b.axpy(1.0, c))
        out = E(st.axpy(h / 6, a))
        out = out.axpy(h / 3, bc).axpy(h / 6, d)
    if not all(np.all(np.isfinite(x)) for x in (out.psi_p, out.psi_m, out.phi, out.phi_t)):
        raise SolverAbort("non-finite values after step")
    return out


# --------------------------------------------------------------------------
# configuration and runs

PRESETS = ("gaussian", "plane-wave", "random-band-limited")


@dataclass
class SolverConfig:
    N: int = 32
    dt: float = 1.0 / 256
    T: float = 1.0
    box: float = 2 * np.pi
    s: float = 0.5
    r: float = 1.0
    dealias: bool = True
    integrator: str = "ifrk4"
    coupling: float = 1.0
    data: Dict = field(default_factory=lambda: {"preset": "gaussian"})
    record_every: int = 1

    def validate(self):
        if not isinstance(self.N, int) or self.N < 2 or self.N & (self.N - 1):
            raise ValueError("N: must be a power of two")
        if not self.dt > 0:
            raise ValueError("dt: must be positive")
        if not self.T >= 0:
            raise ValueError("T: must be nonnegative")
        if not self.box > 0:
            raise ValueError("box: must be positive")
        if self.integrator != "ifrk4":
            raise ValueError("integrator: only 'ifrk4' is available")
        if not isinstance(self.record_every, int) or self.record_every < 1:
            raise ValueError("record_every: must be a positive integer")
        preset = self.data.get("preset")
        if preset not in PRESETS:
            raise ValueError(f"data.preset: expected one of {PRESETS}")
        return self


def initial_data(grid: Grid, opts: Dict):
    """(psi, phi, phi_t) in physical space for a named preset."""
    opts = dict(opts)
    preset = opts.pop("preset")
    amp = float(opts.pop("amplitude", 0.5))
    if preset == "gaussian":
        width = float(opts.pop("width", 0.8))
        c = grid.box / 2
        kap = 1.0 / width ** 2
        w = 2 * np.pi / grid.box

        def bump(shift):
            # periodic analogue of exp(-|x - c|^2 / (2 width^2)); entire, so spectrally resolved
            return np.exp(kap / w ** 2 * np.sum(np.cos(w * (grid.x - c - shift)) - 1, axis=0))
        g = bump(0.0)
        spin = np.array([1.0, 0.5j, 0.25, -0.5], DTYPE)
        psi = amp * spin[:, None, None, None] * g
        phi = amp * bump(0.3)
        phi_t = 0.5 * amp * g * np.cos(w * (grid.x[0] - c))
    elif preset == "plane-wave":
        n = np.asarray(opts.pop("mode", (1, 0, 0)), float)
        xi = 2 * np.pi / grid.box * n
        v = eigenvector(xi, 1)
        phase = np.exp(1j * np.tensordot(xi, grid.x, axes=1))
        psi = amp * v[:, None, None, None] * phase
        phi = np.zeros_like(grid.kabs)
        phi_t = np.zeros_like(grid.kabs)
    elif preset == "random-band-limited":
        seed = int(opts.pop("seed"))
        kmax = float(opts.pop("kmax", grid.N / 4))
        rng = np.random.default_rng(seed)
        band = (grid.kabs <= kmax) & grid.mask
        decay = np.exp(-grid.kabs ** 2 / (2 * (kmax / 2) ** 2)) * band
        def rnd(shape):
            return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * decay
        psi = grid.ifft(rnd((4,) + grid.kabs.shape))
        psi *= amp / np.sqrt(np.mean(np.abs(psi) ** 2))
        phi = grid.ifft(rnd(grid.kabs.shape)).real
        phi *= amp / np.sqrt(np.mean(phi ** 2))
        phi_t = np.zeros_like(phi)
    else:
        raise ValueError(f"unknown preset {preset!r}")
    if opts:
        raise ValueError(f"data: unknown keys {sorted(opts)}")
    return psi, phi, phi_t


def diagnostics(grid: Grid, st: State, s: float, r: float) -> Dict[str, float]:
    psi_hat = st.psi_p + st.psi_m
    phi = grid.ifft(st.phi)
    psi = grid.ifft(psi_hat)
    return {
        "charge": grid.l2sq_hat(psi_hat),
        "psi_Hs": float(grid.sobolev(psi_hat, s)),
        "phi_Hr": float(grid.sobolev(st.phi, r)),
        "phit_Hr1": float(grid.sobolev(st.phi_t, r - 1)),
        "phi_imag": float(np.abs(phi.imag).max()),
        "beta_form_imag": float(np.abs(beta_form(psi).imag).max()),
    }


def run(config: SolverConfig, data=None, state: Optional[State] = None):
    """Evolve to T; returns (final state, dict of time series)."""
    config.validate()
    grid = Grid(config.N, config.box, config.dealias)
    if state is None:
        psi, phi, phi_t = data if data is not None else initial_data(grid, config.data)
        if np.abs(np.imag(phi)).max() > 0 or np.abs(np.imag(phi_t)).max() > 0:
            raise ValueError("phi and phi_t must be real")
        state = make_state(grid, psi, np.real(phi), np.real(phi_t))
    nsteps = int(round(config.T / config.dt))
    if nsteps and abs(nsteps * config.dt - config.T) > 1e-12 * max(1.0, config.T):
        raise ValueError("T must be an integer multiple of dt")
    rows = {"t": []}
    def record(t, st):
        d = diagnostics(grid, st, config.s, config.r)
        rows["t"].append(t)
        for k, v in d.items():
            rows.setdefault(k, []).append(v)
    record(0.0, state)
    st = state
    for n in range(1, nsteps + 1):
        st = step(grid, st, config.dt, config.coupling)
        if n % config.record_every == 0 or n == nsteps:
            record(n * config.dt, st)
    return st, {k: np.asarray(v) for k, v in rows.items()}


def series_csv(series) -> str:
    import csv
    import io
    keys = ["t", "charge", "psi_Hs", "phi_Hr", "phit_Hr1", "phi_imag", "beta_form_imag"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for i in range(len(series["t"])):
        w.writerow([repr(float(series[k][i])) for k in keys])
    return buf.getvalue()


def state_distance(grid_a: Grid, a: State, grid_b: Grid, b: State) -> float:
    """L^2 distance between two states on possibly different grids, compared on common modes."""
    if grid_a.N > grid_b.N:
        grid_a, a, grid_b, b = grid_b, b, grid_a, a
    n, m = grid_a.N, grid_b.N

    def embed(u):
        # coarse coefficients scaled to the fine grid's normalization, placed at matching wavenumbers
        out = np.zeros(u.shape[:-3] + (m, m, m), DTYPE)
        i = np.fft.fftfreq(n, 1.0 / n).astype(int)
        ix = np.ix_(i % m, i % m, i % m)
        out[(Ellipsis,) + ix] = u * (m / n) ** 3
        return out
    tot = 0.0
    for ua, ub in ((a.psi_p + a.psi_m, b.psi_p + b.psi_m), (a.phi, b.phi), (a.phi_t, b.phi_t)):
        tot += grid_b.l2sq_hat(embed(ua) - ub)
    return float(np.sqrt(tot))


def temporal_order(config: SolverConfig, dts=(1 / 16, 1 / 32, 1 / 64), ref_factor=8):
    """Observed order from errors against a fine-step reference run."""
    grid = Grid(config.N, config.box, config.dealias)
    ref_cfg = replace(config, dt=dts[-1] / ref_factor)
    ref, _ = run(ref_cfg)
    errs = []
    for h in dts:
        st, _ = run(replace(config, dt=h))
        errs.append(state_distance(grid, st, grid, ref))
    errs = np.asarray(errs)
    orders = np.log(errs[:-1] / errs[1:]) / np.log(np.asarray(dts[:-1]) / np.asarray(dts[1:]))
    return errs, orders


# --------------------------------------------------------------------------
# spacetime norms

TAPERS = ("raised-cosine", "none")


def taper_window(Nt: int, kind: str = "raised-cosine"):
    if kind == "none":
        return np.ones(Nt)
    if kind == "raised-cosine":
        # Hann window sin^2(pi (n + 1/2) / Nt): smooth at both ends of the time window
        return np.sin(np.pi * (np.arange(Nt) + 0.5) / Nt) ** 2
    raise ValueError(f"taper must be one of {TAPERS}")


def spacetime_norm(u, a: float, b: float, variant: str = "H", T: float = 1.0, box: float = 2 * np.pi,
                   taper: str = "raised-cosine") -> float:
    """Discrete norm with weight <xi>^a <tau +- |xi|>^b (Xplus/Xminus) or <xi>^a <|tau| - |xi|>^b (H).

    u has shape (Nt, N, N, N) (or (Nt, N) / (Nt, N, N)); samples cover a window of length T.
    """
    u = np.asarray(u, DTYPE)
    Nt = u.shape[0]
    dims = u.shape[1:]
    dt = T / Nt
    u = u * taper_window(Nt, taper).reshape((Nt,) + (1,) * len(dims))
    uh = np.fft.fftn(u)
    tau = 2 * np.pi * np.fft.fftfreq(Nt, dt)
    ks = [2 * np.pi / box * np.fft.fftfreq(n, 1.0 / n) for n in dims]
    K = np.meshgrid(tau, *ks, indexing="ij")
    kabs = np.sqrt(sum(k ** 2 for k in K[1:]))
    tt = K[0]
    if variant in ("Xplus", "X+"):
        mod = tt + kabs
    elif variant in ("Xminus", "X-"):
        mod = tt - kabs
    elif variant == "H":
        mod = np.abs(tt) - kabs
    else:
        raise ValueError("variant must be 'H', 'Xplus' or 'Xminus'")
    w = (1 + kabs ** 2) ** a * (1 + mod ** 2) ** b
    dx = box / dims[0]
    return float(np.sqrt(np.sum(np.abs(uh) ** 2 * w) * dt * dx ** len(dims) / u.size))


def direct_l2(u, T=1.0, box=2 * np.pi, taper="none"):
    u = np.asarray(u, DTYPE)
    Nt = u.shape[0]
    u = u * taper_window(Nt, taper).reshape((Nt,) + (1,) * (u.ndim - 1))
    dx = box / u.shape[1]
    return float(np.sqrt(np.sum(np.abs(u) ** 2) * (T / Nt) * dx ** (u.ndim - 1)))


def free_wave_array(N: int, Nt: int, mode=(1, 0, 0), T: float = 2 * np.pi, box: float = 2 * np.pi):
    """e^{-it|xi0|} e^{ix.xi0} sampled on an (Nt, N, N, N) grid."""
    xi = 2 * np.pi / box * np.asarray(mode, float)
    t = T / Nt * np.arange(Nt)
    x1 = box / N * np.arange(N)
    X = np.stack(np.meshgrid(x1, x1, x1, indexing="ij"))
    space = np.exp(1j * np.tensordot(xi, X, axes=1))
    return np.exp(-1j * t * np.linalg.norm(xi))[:, None, None, None] * space[None]


def random_spacetime(rng, Nt, N, kmax=None, tmax=None, box=2 * np.pi, T=1.0):
    """Random band-limited scalar spacetime array."""
    kmax = N / 4 if kmax is None else kmax
    tmax = Nt / 4 if tmax is None else tmax
    k = np.fft.fftfreq(N, 1.0 / N)
    kt = np.fft.fftfreq(Nt, 1.0 / Nt)
    KT, K1, K2, K3 = np.meshgrid(kt, k, k, k, indexing="ij")
    band = (np.abs(KT) <= tmax) & (np.sqrt(K1 ** 2 + K2 ** 2 + K3 ** 2) <= kmax)
    c = (rng.standard_normal(band.shape) + 1j * rng.standard_normal(band.shape)) * band
    return np.fft.ifftn(c)


def empirical_embedding_check(emb, trials: int = 8, seed: int = 0, N: int = 8, Nt: int = 16,
                              T: float = 2 * np.pi, box: float = 2 * np.pi) -> float:
    """Worst observed ||uv||_target / (||u||_left ||v||_right) over random band-limited u, v.

    ``emb`` is an Embedding (or anything with left/right/target carrying a, b) evaluated at
    rationals.  A heuristic smoke test: finite grids cannot certify an embedding.
    """
    if N > 16 or Nt > 32:
        raise ValueError("keep N <= 16 and Nt <= 32")
    f = lambda v: float(v.q) if hasattr(v, "q") else float(v)
    (la, lb), (ra, rb), (ta, tb) = [(f(s.a), f(s.b)) for s in (emb.left, emb.right, emb.target)]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = random_spacetime(rng, Nt, N, box=box, T=T)
        v = random_spacetime(rng, Nt, N, box=box, T=T)
        num = spacetime_norm(u * v, ta, tb, "H", T, box, "none")
        den = spacetime_norm(u, la, lb, "H", T, box, "none") * spacetime_norm(v, ra, rb, "H", T, box, "none")
        worst = max(worst, num / den)
    return worst


# --------------------------------------------------------------------------
# raw snapshots: b"DKGA" | uint32 ndim | uint32 dims... | 8-byte dtype string | little-endian data

MAGIC = b"DKGA"


def save_array(path, arr):
    arr = np.asarray(arr)
    dt = arr.dtype.newbyteorder("<")
    code = dt.str.encode().ljust(8, b" ")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(code)
        fh.write(arr.astype(dt, copy=False).tobytes(order="C"))


def load_array(path):
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError("not a raw array file")
        (nd,) = struct.unpack("<I", fh.read(4))
        dims = struct.unpack(f"<{nd}I", fh.read(4 * nd))
        code = fh.read(8).decode().strip()
        data = np.frombuffer(fh.read(), dtype=np.dtype(code))
    return data.reshape(dims)

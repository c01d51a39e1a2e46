"""Randomized checks of the cone geometry behind the bilinear null-form bounds.

Notation for a point (tau, xi; lam, eta) with zeta = eta - xi:
Gamma = |tau| - |xi|, Theta = lam + |eta|, Sigma_pm = lam - tau +- |zeta|,
kappa_+ = |xi| - ||eta| - |zeta||, kappa_- = |eta| + |zeta| - |xi|,
theta_pm = angle(eta, +-zeta).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import dirac_algebra as da

BRACKET = (1 / 16, 16.0)
SYMBOL_CONSTANT = 4.0
ANGLE_CUTOFF = 1e-8
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class FrequencyPoint:
    tau: float
    xi: np.ndarray
    lam: float
    eta: np.ndarray


def _norm(v):
    return np.linalg.norm(v, axis=-1)


def stable_angle(u, v):
    """Angle between u and v via 2 atan2(|u^ - v^|, |u^ + v^|); accurate near 0 and pi."""
    uh = u / _norm(u)[..., None]
    vh = v / _norm(v)[..., None]
    return 2 * np.arctan2(_norm(uh - vh), _norm(uh + vh))


def derived_arrays(tau, xi, lam, eta):
    """Vectorized (Gamma, Theta, Sigma+, Sigma-, kappa+, kappa-, theta+, theta-).

    kappa_pm are evaluated as sums of squares so they are never negative in
    floating point: kappa_+ = ab|eta^ - zeta^|^2 / (|xi| + |a - b|), and
    kappa_- = ab|eta^ + zeta^|^2 / (a + b + |xi|), with a = |eta|, b = |zeta|.
    """
    tau, lam = np.asarray(tau, float), np.asarray(lam, float)
    xi, eta = np.asarray(xi, float), np.asarray(eta, float)
    zeta = eta - xi
    a, b, c = _norm(eta), _norm(zeta), _norm(xi)
    if np.any(a == 0) or np.any(b == 0):
        raise ValueError("degenerate direction: eta and eta - xi must be nonzero")
    eh, zh = eta / a[..., None], zeta / b[..., None]
    kp = a * b * np.sum((eh - zh) ** 2, axis=-1) / np.maximum(c + np.abs(a - b), np.finfo(float).tiny)
    km = a * b * np.sum((eh + zh) ** 2, axis=-1) / (a + b + c)
    gamma = np.abs(tau) - c
    theta = lam + a
    sp = lam - tau + b
    sm = lam - tau - b
    thp = stable_angle(eta, zeta)
    thm = stable_angle(eta, -zeta)
    return gamma, theta, sp, sm, kp, km, thp, thm


def derived_quantities(p: FrequencyPoint):
    out = derived_arrays(np.array([p.tau]), np.asarray(p.xi, float)[None], np.array([p.lam]),
                         np.asarray(p.eta, float)[None])
    return tuple(float(x[0]) for x in out)


def naive_kappas(xi, eta):
    """kappa_pm from the raw definitions (for cross-checking the stable forms)."""
    zeta = eta - xi
    a, b, c = _norm(eta), _norm(zeta), _norm(xi)
    return c - np.abs(a - b), a + b - c


# --------------------------------------------------------------------------
# sampling


def sample_points(n, rng, near_cone=0.5, small_xi=0.0):
    """n points with |eta|, |eta - xi| log-uniform in [1, 1e3] and uniform directions.

    A fraction ``near_cone`` puts tau and lam within O(1) of the cones
    |tau| = |xi|, lam = -|eta| or lam = tau -+ |eta - xi|.  A fraction
    ``small_xi`` draws |xi| log-uniform in [1e-3, 1e-1] * |eta| instead.
    """
    a = 10 ** rng.uniform(0, 3, n)
    b = 10 ** rng.uniform(0, 3, n)
    eta = da.random_directions(n, rng) * a[:, None]
    zeta = da.random_directions(n, rng) * b[:, None]
    nsmall = int(round(small_xi * n))
    if nsmall:
        # |eta| >= 10 keeps |eta - xi| >= 9 when |xi| <= |eta|/10
        a[:nsmall] = 10 ** rng.uniform(1, 3, nsmall)
        eta[:nsmall] = da.random_directions(nsmall, rng) * a[:nsmall, None]
        f = 10 ** rng.uniform(-3, -1, nsmall)
        xs = da.random_directions(nsmall, rng) * (f * a[:nsmall])[:, None]
        zeta[:nsmall] = eta[:nsmall] - xs
    xi = eta - zeta
    c = _norm(xi)
    bz = _norm(zeta)
    scale = 2 * (a + bz) + 2
    tau = rng.uniform(-1, 1, n) * scale
    lam = rng.uniform(-1, 1, n) * scale
    near = rng.random(n) < near_cone
    k = int(near.sum())
    if k:
        u = rng.uniform(-1, 1, (k, 2))
        sgn = np.where(rng.random(k) < 0.5, 1.0, -1.0)
        tau_n = sgn * c[near] + u[:, 0]
        mode = rng.integers(0, 3, k)
        lam_n = np.where(mode == 0, -a[near] + u[:, 1],
                         np.where(mode == 1, tau_n - bz[near] + u[:, 1], tau_n + bz[near] + u[:, 1]))
        tau[near], lam[near] = tau_n, lam_n
    return tau, xi, lam, eta


def adversarial_points(m=100, seed=12345):
    """Hand-placed near-collinear configurations with Gamma, Theta and Sigma_pm of size O(1)."""
    rng = np.random.default_rng(seed)
    pts = []
    for i in range(m):
        a = 1 + 3 * (i % 10)
        b = a + (i % 3) * 0.5
        d = np.array([1.0, 0.0, 0.0])
        tilt = 10.0 ** (-(i % 7)) * rng.standard_normal(3)
        eta = a * d
        zeta = (b * (d if i % 2 == 0 else -d)) + tilt
        xi = eta - zeta
        c = np.linalg.norm(xi)
        tau = c if i % 4 < 2 else -c
        lam = -a + (i % 5 - 2) * 0.25
        pts.append((tau, xi, lam, eta))
    tau, xi, lam, eta = (np.array(x) for x in zip(*pts))
    return tau, xi, lam, eta


# --------------------------------------------------------------------------
# checks


def _violations(tau, xi, lam, eta):
    g, th, sp, sm, kp, km, _, _ = derived_arrays(tau, xi, lam, eta)
    a, b = _norm(eta), _norm(eta - xi)
    mn = np.minimum(a, b)
    tol = 1e-9 * (1 + np.abs(tau) + np.abs(lam) + a + b)
    bad = 0
    bad += int(np.sum(kp < 0) + np.sum(km < 0))
    bad += int(np.sum(kp > 2 * mn + tol) + np.sum(km > 2 * mn + tol))
    bad += int(np.sum(kp > np.abs(g) + np.abs(th) + np.abs(sp) + tol))
    bad += int(np.sum(km > np.abs(g) + np.abs(th) + np.abs(sm) + tol))
    return bad


def check_exact_bounds(n, seed, chunk=200_000, include_adversarial=True) -> int:
    """Violations of kappa_pm <= 2 min(|eta|, |eta-xi|) and kappa_pm <= |Gamma| + |Theta| + |Sigma_pm|."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0
    rng = np.random.default_rng(seed)
    bad = 0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        bad += _violations(*sample_points(m, rng))
        done += m
    if include_adversarial:
        bad += _violations(*adversarial_points())
    return bad


def comparability_ratios(tau, xi, lam, eta):
    """Ratios theta^2 / rhs for the three angle relations, degenerate angles removed.

    Returns (ratios, degenerate_ok) where ratios maps relation name to an array
    and degenerate_ok says both sides vanish wherever the angle is below the cutoff.
    """
    _, _, _, _, kp, km, thp, thm = derived_arrays(tau, xi, lam, eta)
    a, b, c = _norm(eta), _norm(eta - xi), _norm(xi)
    rhs_p = c * kp / (a * b)
    rhs_m = (a + b) * km / (a * b)
    rhs_m2 = km / np.minimum(a, b)
    out = {}
    ok = True
    for name, th, rhs in (("theta+", thp, rhs_p), ("theta-", thm, rhs_m), ("theta-min", thm, rhs_m2)):
        deg = th < ANGLE_CUTOFF
        if np.any(deg):
            ok &= bool(np.all(rhs[deg] <= 1e-12 * (1 + c[deg])))
        out[name] = th[~deg] ** 2 / rhs[~deg]
    return out, ok


def check_comparability(n, seed):
    """Empirical (max, min) of theta^2/rhs per relation on constrained samples.

    Also reports the theta- relation restricted to |xi| <= |eta|/10 (small output frequency).
    """
    rng = np.random.default_rng(seed)
    tau, xi, lam, eta = sample_points(n, rng, small_xi=0.2)
    ratios, ok = comparability_ratios(tau, xi, lam, eta)
    c, a, b = _norm(xi), _norm(eta), _norm(eta - xi)
    small = c <= 0.1 * np.minimum(a, b)
    sub, _ = comparability_ratios(tau[small], xi[small], lam[small], eta[small])
    res = {k: (float(v.max()), float(v.min())) for k, v in ratios.items()}
    if small.any():
        res["theta-small-xi"] = (float(sub["theta-"].max()), float(sub["theta-"].min()))
    res["degenerate_ok"] = ok
    return res


def within_bracket(res, bracket=BRACKET) -> bool:
    lo, hi = bracket
    return all(lo <= v[1] and v[0] <= hi for k, v in res.items() if k != "degenerate_ok")


def null_symbol_ratios(n, seed, signs=(1, 1)):
    """||beta P_{-s2}(eta - xi) P_{s1}(eta)|| / angle(s1 eta, s2 (eta - xi)) and the aligned residual."""
    rng = np.random.default_rng(seed)
    eta = da.random_directions(n, rng) * (10 ** rng.uniform(0, 3, n))[:, None]
    zeta = da.random_directions(n, rng) * (10 ** rng.uniform(0, 3, n))[:, None]
    # a tenth of the sample is nearly aligned to probe the small-angle regime
    m = n // 10
    s1, s2 = signs
    zeta[:m] = s1 * s2 * (eta[:m] + 1e-3 * rng.standard_normal((m, 3)) * _norm(eta[:m])[:, None]) * \
        rng.uniform(0.5, 2, (m, 1))
    sym = da.opnorm(da.null_symbol(eta, zeta, signs))
    ang = stable_angle(s1 * eta, s2 * zeta)
    keep = ang >= ANGLE_CUTOFF
    aligned = da.null_symbol(eta[:5], s1 * s2 * eta[:5] * 3.0, signs)
    return sym[keep] / ang[keep], float(np.abs(aligned).max())


def check_null_symbol_bound(n, seed):
    """Empirical sup of symbol norm / angle over all four sign pairs, and the aligned residual."""
    if n < 1:
        raise ValueError("n must be positive")
    sup, resid = {}, 0.0
    for signs in SIGN_PAIRS:
        r, res = null_symbol_ratios(n, seed, signs)
        sup[signs] = float(r.max())
        resid = max(resid, res)
    const = max(sup.values())
    if not np.isfinite(const):
        raise ArithmeticError("null symbol ratio is not finite")
    return {"constant": const, "per_sign": sup, "aligned_residual": resid}


def results_csv(exact_n, exact_seed, comp_n, comp_seeds, sym_n, sym_seed) -> str:
    """CSV of relation, max ratio, min ratio, violations, samples, seed."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["relation", "max_ratio", "min_ratio", "violations", "samples", "seed"])
    v = check_exact_bounds(exact_n, exact_seed)
    w.writerow(["kappa bounds", "", "", v, exact_n, exact_seed])
    for sd in comp_seeds:
        res = check_comparability(comp_n, sd)
        for k, val in res.items():
            if k == "degenerate_ok":
                continue
            w.writerow([k, repr(val[0]), repr(val[1]), int(not (BRACKET[0] <= val[1] and val[0] <= BRACKET[1])),
                        comp_n, sd])
    sym = check_null_symbol_bound(sym_n, sym_seed)
    for signs, c in sym["per_sign"].items():
        w.writerow([f"null symbol {signs[0]:+d}{signs[1]:+d}", repr(c), "", int(c > SYMBOL_CONSTANT), sym_n, sym_seed])
    return buf.getvalue()

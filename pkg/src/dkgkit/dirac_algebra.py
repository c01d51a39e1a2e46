"""Dirac matrices, half-wave projections P_pm(xi) and the null symbol."""
import numpy as np

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
Z2 = np.zeros((2, 2), dtype=complex)

BETA = np.block([[I2, Z2], [Z2, -I2]])
ALPHA = np.array([np.block([[Z2, s], [s, Z2]]) for s in SIGMA])


def dirac_matrices():
    """Return (beta, alpha) with alpha of shape (3, 4, 4)."""
    return BETA.copy(), ALPHA.copy()


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def unit(xi) -> np.ndarray:
    """xi/|xi| along the last axis; zero vectors are rejected."""
    xi = np.asarray(xi, dtype=float)
    n = np.linalg.norm(xi, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("direction must be a nonzero vector")
    return xi / n


def alpha_dot(xi) -> np.ndarray:
    """xi_hat . alpha, vectorized over leading axes."""
    return np.einsum("...j,jab->...ab", unit(xi).astype(complex), ALPHA)


def projection(xi, sign=1) -> np.ndarray:
    """P_sign(xi) = (I + sign * xi_hat.alpha) / 2."""
    return 0.5 * (I4 + _sign(sign) * alpha_dot(xi))


def eigenvector(xi, sign=1) -> np.ndarray:
    """v_+(xi) = [1, 0, xi3, xi1 + i xi2] for unit xi; v_-(xi) = v_+(-xi)."""
    x = unit(xi) * _sign(sign)
    v = np.zeros(x.shape[:-1] + (4,), dtype=complex)
    v[..., 0] = 1
    v[..., 2] = x[..., 2]
    v[..., 3] = x[..., 0] + 1j * x[..., 1]
    return v


def beta_pairing(eta, zeta) -> complex:
    """<beta v_+(eta), v_+(zeta)> from the closed form 1 - eta.zeta + i (eta1 zeta2 - eta2 zeta1)."""
    e, z = unit(eta), unit(zeta)
    return 1 - np.sum(e * z, axis=-1) + 1j * (e[..., 0] * z[..., 1] - e[..., 1] * z[..., 0])


def beta_pairing_matrix(eta, zeta):
    """Same pairing, computed as v_+(zeta)^* beta v_+(eta)."""
    ve, vz = eigenvector(eta, 1), eigenvector(zeta, 1)
    return np.einsum("...a,ab,...b->...", vz.conj(), BETA, ve)


def angle(eta, zeta):
    """Angle in [0, pi] between two nonzero vectors."""
    c = np.sum(unit(eta) * unit(zeta), axis=-1)
    return np.arccos(np.clip(c, -1.0, 1.0))


def null_symbol(eta, eta_minus_xi, signs=(1, 1)) -> np.ndarray:
    """beta P_{-s2}(eta - xi) P_{s1}(eta) for signs (s1, s2).

    It vanishes when s1*eta and s2*(eta - xi) point the same way; its size is
    controlled by the angle between them.
    """
    s1, s2 = _sign(signs[0]), _sign(signs[1])
    return BETA @ projection(eta_minus_xi, -s2) @ projection(eta, s1)


def null_angle(eta, eta_minus_xi, signs=(1, 1)):
    s1, s2 = _sign(signs[0]), _sign(signs[1])
    return angle(s1 * np.asarray(eta, float), s2 * np.asarray(eta_minus_xi, float))


def opnorm(m) -> np.ndarray:
    """Spectral norm over the last two axes."""
    return np.linalg.norm(m, ord=2, axis=(-2, -1))


def random_directions(n, rng) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def identity_battery(n=1000, seed=0) -> dict:
    """Max entrywise residual of every algebraic identity over n random directions."""
    rng = np.random.default_rng(seed)
    beta, alpha = BETA, ALPHA
    res = {}
    res["beta_hermitian"] = np.abs(beta - beta.conj().T).max()
    res["alpha_hermitian"] = max(np.abs(a - a.conj().T).max() for a in alpha)
    res["beta_squared"] = np.abs(beta @ beta - I4).max()
    res["alpha_squared"] = max(np.abs(a @ a - I4).max() for a in alpha)
    res["anticommute"] = max(np.abs(a @ beta + beta @ a).max() for a in alpha)

    xi = random_directions(n, rng) * rng.uniform(0.1, 10.0, (n, 1))
    pp, pm = projection(xi, 1), projection(xi, -1)
    herm = lambda m: np.swapaxes(m.conj(), -1, -2)
    res["idempotent"] = max(np.abs(pp @ pp - pp).max(), np.abs(pm @ pm - pm).max())
    res["projection_hermitian"] = max(np.abs(pp - herm(pp)).max(), np.abs(pm - herm(pm)).max())
    res["complete"] = np.abs(pp + pm - I4).max()
    res["orthogonal"] = max(np.abs(pp @ pm).max(), np.abs(pm @ pp).max())
    res["difference"] = np.abs(alpha_dot(xi) - (pp - pm)).max()
    # beta P_pm(xi) = P_mp(xi) beta
    res["beta_intertwine"] = max(np.abs(beta @ pp - pm @ beta).max(), np.abs(beta @ pm - pp @ beta).max())
    v = eigenvector(xi, 1)
    res["eigen_plus"] = np.abs(np.einsum("nab,nb->na", pp, v) - v).max()
    w = eigenvector(xi, -1)
    res["eigen_minus"] = np.abs(np.einsum("nab,nb->na", pm, w) - w).max()
    zeta = random_directions(n, rng)
    res["pairing"] = np.abs(beta_pairing(xi, zeta) - beta_pairing_matrix(xi, zeta)).max()
    return {k: float(v) for k, v in res.items()}

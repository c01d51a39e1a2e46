"""Figures written next to the CSV/JSON outputs of the CLI report paths."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import region_policy  # noqa: E402

_COLORS = {"R1": "#4c72b0", "R2": "#55a868", "R3": "#c44e52", "R4": "#8172b2", "Exterior": "#ccb974"}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def region_figure(path, s_max=2, point=None, label=None):
    """Labelled pieces of the admissible (s, r) set, optionally marking one point."""
    polys = region_policy.polygons(s_max)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    for name, pts in polys.items():
        xy = np.array([[float(a), float(b)] for a, b in pts])
        if name == "admissible":
            ax.plot(*np.vstack([xy, xy[:1]]).T, color="k", lw=1.2)
            continue
        ax.fill(xy[:, 0], xy[:, 1], color=_COLORS[name], alpha=0.45, lw=0.8, ec="k", label=name)
    for v, (s, r) in region_policy.VERTICES.items():
        ax.annotate(v, (float(s), float(r)), textcoords="offset points", xytext=(4, 3), fontsize=8)
    # the segment BD is its own piece
    ax.plot([0.5, 0.5], [1, 1.5], color="k", lw=2.5, label="BD")
    if point is not None:
        ax.plot(float(point[0]), float(point[1]), "k*", ms=12, label=label or "query")
    ax.set_xlabel("s")
    ax.set_ylabel("r")
    ax.set_xlim(0, float(s_max))
    ax.set_ylim(0, float(s_max) + 1.1)
    ax.legend(loc="upper left", fontsize=8)
    return _save(fig, path)


def scan_figure(path, rows):
    """log(ratio) against log(L) per family and exponent tuple, with the predicted slope."""
    fams = sorted({r[0] for r in rows}, key=[r[0] for r in rows].index)
    fig, axes = plt.subplots(1, len(fams), figsize=(3.2 * len(fams), 3.2), squeeze=False)
    for ax, f in zip(axes[0], fams):
        sub = [r for r in rows if r[0] == f]
        for e in sorted({r[1] for r in sub}, key=[r[1] for r in sub].index):
            pts = [(r[2], r[3]) for r in sub if r[1] == e]
            L, q = np.array(pts, float).T
            fd, pd = next((r[4], r[5]) for r in sub if r[1] == e)
            line, = ax.loglog(L, q, "o", ms=3, label=f"fit {fd:+.3f} / pred {pd:+.3f}")
            ax.loglog(L, q[0] * (L / L[0]) ** (-pd), "--", color=line.get_color(), lw=0.8)
        ax.set_title(f, fontsize=9)
        ax.set_xlabel("L")
        ax.legend(fontsize=6)
    axes[0][0].set_ylabel("ratio")
    return _save(fig, path)


def series_figure(path, series):
    """Charge drift and the three Sobolev norms over time."""
    t = np.asarray(series["t"])
    c = np.asarray(series["charge"])
    fig, (a0, a1) = plt.subplots(1, 2, figsize=(9, 3.4))
    drift = np.abs(c - c[0]) / c[0]
    a0.semilogy(t, np.maximum(drift, 1e-18))
    a0.set_xlabel("t")
    a0.set_ylabel("relative charge drift")
    for k, lab in (("psi_Hs", "psi in H^s"), ("phi_Hr", "phi in H^r"), ("phit_Hr1", "phi_t in H^(r-1)")):
        a1.plot(t, series[k], label=lab)
    a1.set_xlabel("t")
    a1.legend(fontsize=8)
    return _save(fig, path)

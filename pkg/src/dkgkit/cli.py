"""Command-line entry point: every subcommand writes its outputs plus a manifest.json."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, fields
from fractions import Fraction as Fr
from pathlib import Path

import numpy as np

from . import __version__
from . import counterexamples as cex
from . import dirac_algebra, dkg_solver, embedding_engine, nullform_numerics, region_policy

EXIT_OK, EXIT_INVALID, EXIT_ABORT = 0, 1, 2


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# config

_TYPES = {"N": int, "dt": float, "T": float, "box": float, "s": float, "r": float, "dealias": bool,
          "integrator": str, "coupling": float, "data": dict, "record_every": int}


def load_config(path) -> dkg_solver.SolverConfig:
    """Solver config from JSON; unknown keys and bad values are rejected by name."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> dkg_solver.SolverConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(dkg_solver.SolverConfig)}
    for k, v in raw.items():
        if k not in known:
            raise ConfigError(f"{k}: unknown key")
        want = _TYPES[k]
        ok = isinstance(v, want) and not (want is int and isinstance(v, bool))
        if want is float and isinstance(v, int) and not isinstance(v, bool):
            ok = True
        if not ok:
            raise ConfigError(f"{k}: expected {want.__name__}")
    cfg = dkg_solver.SolverConfig(**raw)
    try:
        cfg.validate()
        grid = dkg_solver.Grid(min(cfg.N, 8), cfg.box)
        dkg_solver.initial_data(grid, cfg.data)     # rejects unknown data keys early
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc).strip("'"))
    return cfg


# --------------------------------------------------------------------------
# helpers


def _rat(x: str) -> Fr:
    try:
        return Fr(x)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {x!r}")


def _Ls(text: str):
    """'64..4096' (powers of two) or a comma list."""
    if ".." in text:
        lo, hi = (int(t) for t in text.split(".."))
        out = []
        L = lo
        while L <= hi:
            out.append(L)
            L *= 2
        return out
    return [float(t) for t in text.split(",")]


def _write(out: Path, name: str, text: str, written: list):
    p = out / name
    p.write_text(text)
    written.append(str(p))


def _manifest(out: Path, sub: str, config: dict, seeds, written: list, anchors=()):
    m = {"subcommand": sub, "config": config, "seeds": list(seeds), "version": __version__,
         "outputs": sorted(written), "anchors": list(anchors)}
    (out / "manifest.json").write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")
    return m


def _err(msg):
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# subcommands


def cmd_region(a, out):
    from . import plotting
    s, r = _rat(a.s), _rat(a.r)
    v = region_policy.classify_full(s, r)
    written = []
    _write(out, "region.json", json.dumps(v.to_json(), indent=2) + "\n", written)
    _write(out, "polygons.csv", region_policy.polygons_csv(a.s_max), written)
    if not a.no_plots:
        written.append(plotting.region_figure(out / "region.png", a.s_max, (s, r), v.region))
    _manifest(out, "region", {"s": str(s), "r": str(r), "s_max": a.s_max}, [], written, [v.region])
    if not v.admissible:
        _err(f"({s}, {r}) is not admissible: {', '.join(v.failing_constraints)}")
        return EXIT_INVALID
    print(f"{v.region} ({v.piece}) sigma = {v.sigma} rho = {v.rho}")
    return EXIT_OK


def cmd_audit(a, out):
    if a.all:
        pts = embedding_engine.default_grid(n_min=a.grid)
        cases = embedding_engine.AUDIT_IDS
    else:
        if a.s is None or a.r is None or a.case is None:
            raise ConfigError("--case, --s and --r are required without --all")
        pts = [(_rat(a.s), _rat(a.r))]
        cases = (a.case,)
    reports = []
    for s, r in pts:
        if not region_policy.admissible(s, r).admissible:
            raise ConfigError(f"({s}, {r}) is not admissible")
        reports.extend(embedding_engine.audit_case(c, s, r) for c in cases)
    written = []
    body = [rep.to_json() for rep in reports] if a.full else [
        {k: v for k, v in rep.to_json().items() if k != "derivation"} for rep in reports]
    _write(out, "audit.json", json.dumps(body, indent=1) + "\n", written)
    failed = [rep for rep in reports if not rep.proven]
    _manifest(out, "audit", {"all": a.all, "grid": a.grid, "points": len(pts), "cases": list(cases)}, [],
              written, sorted({rep.case for rep in reports}))
    print(f"{len(reports) - len(failed)}/{len(reports)} proven over {len(pts)} points")
    for rep in failed[:20]:
        _err(f"failed: {rep.case} at (s, r) = ({rep.s}, {rep.r}) [{rep.region}/{rep.piece}]: {rep.detail}")
    return EXIT_INVALID if failed else EXIT_OK


def cmd_nullform(a, out):
    seeds = [a.seed, a.seed + 1, a.seed + 2]
    text = nullform_numerics.results_csv(a.samples, a.seed, a.samples // 10, seeds, a.samples // 10, a.seed)
    written = []
    _write(out, "nullform.csv", text, written)
    _manifest(out, "nullform", {"samples": a.samples}, seeds, written, ["kappa bounds", "theta brackets",
                                                                        "null symbol"])
    bad = [ln for ln in text.splitlines()[1:] if ln.split(",")[3] not in ("0", "")]
    for ln in bad:
        _err(f"violation: {ln}")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_cex(a, out):
    from . import plotting
    fams = cex.FAMILIES if a.family in (None, "all") else (a.family,)
    for f in fams:
        if f not in cex.FAMILIES:
            raise ConfigError(f"family: unknown {f!r}")
    given = [a.a1, a.a2, a.a3, a.alpha1, a.alpha2, a.alpha3]
    tuples = None
    if any(x is not None for x in given):
        e = tuple(0.0 if x is None else float(x) for x in given)
        tuples = {f: [e] for f in fams}
    Ls = _Ls(a.Ls)
    rows = cex.scan_rows(fams, tuples, Ls)
    written = []
    _write(out, "cex.csv", cex.scan_csv(rows), written)
    if not a.no_plots:
        written.append(plotting.scan_figure(out / "cex.png", rows))
    _manifest(out, "cex", {"families": list(fams), "Ls": Ls, "exponents": tuples}, [], written, list(fams))
    seen = {}
    for f, e, _, _, fd, pd in rows:
        seen[(f, e)] = (fd, pd)
    bad = 0
    for (f, e), (fd, pd) in seen.items():
        ok = abs(fd - pd) <= a.tol
        bad += not ok
        print(f"{f} {e}: fitted {fd:+.4f} predicted {pd:+.4f} {'ok' if ok else 'MISMATCH'}")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_solve(a, out):
    from . import plotting
    cfg = load_config(a.config) if a.config else dkg_solver.SolverConfig()
    written = []
    seeds = [cfg.data["seed"]] if "seed" in cfg.data else []
    try:
        st, series = dkg_solver.run(cfg)
    except dkg_solver.SolverAbort as exc:
        _manifest(out, "solve", asdict(cfg), seeds, written, [cfg.data["preset"]])
        _err(f"numerical abort: {exc}")
        return EXIT_ABORT
    _write(out, "series.csv", dkg_solver.series_csv(series), written)
    grid = dkg_solver.Grid(cfg.N, cfg.box, cfg.dealias)
    for name, arr in (("psi", grid.ifft(st.psi_p + st.psi_m)), ("phi", grid.ifft(st.phi).real),
                      ("phi_t", grid.ifft(st.phi_t).real)):
        p = out / f"{name}.bin"
        dkg_solver.save_array(p, arr)
        written.append(str(p))
    if not a.no_plots:
        written.append(plotting.series_figure(out / "series.png", series))
    _manifest(out, "solve", asdict(cfg), seeds, written, [cfg.data["preset"]])
    c = series["charge"]
    print(f"steps {len(c) - 1} relative charge drift {np.abs(c - c[0]).max() / c[0]:.3e}")
    return EXIT_OK


def cmd_identities(a, out):
    res = dirac_algebra.identity_battery(a.n, a.seed)
    written = []
    _write(out, "identities.json", json.dumps(res, indent=2, sort_keys=True) + "\n", written)
    _manifest(out, "identities", {"n": a.n, "tol": a.tol}, [a.seed], written, sorted(res))
    bad = {k: v for k, v in res.items() if not v < a.tol}
    for k, v in bad.items():
        _err(f"{k}: residual {v:.3e}")
    print(f"{len(res) - len(bad)}/{len(res)} identities within {a.tol:g}")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_norms(a, out):
    try:
        u = dkg_solver.load_array(a.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"input: {exc}")
    if u.ndim < 2:
        raise ConfigError("input: need a (time, space...) array")
    variants = [a.variant] if a.variant else ["H", "Xplus", "Xminus"]
    res = {v: dkg_solver.spacetime_norm(u, a.a, a.b, v, a.T, a.box, a.taper) for v in variants}
    written = []
    _write(out, "norms.json", json.dumps(res, indent=2, sort_keys=True) + "\n", written)
    _manifest(out, "norms", {"input": str(a.input), "a": a.a, "b": a.b, "T": a.T, "box": a.box,
                             "taper": a.taper, "shape": list(u.shape)}, [], written, variants)
    for v, x in res.items():
        print(f"{v}: {x:.10g}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="dkgkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help):
        q = sub.add_parser(name, help=help)
        q.add_argument("--out", default=f"out/{name}", help="output directory")
        q.add_argument("--no-plots", action="store_true")
        q.set_defaults(fn=fn)
        return q

    q = add("region", cmd_region, "classify a point and pick sigma, rho")
    q.add_argument("--s", required=True)
    q.add_argument("--r", required=True)
    q.add_argument("--s-max", type=int, default=2)

    q = add("audit", cmd_audit, "check the case derivations")
    q.add_argument("--all", action="store_true")
    q.add_argument("--grid", type=int, default=210)
    q.add_argument("--case")
    q.add_argument("--s")
    q.add_argument("--r")
    q.add_argument("--full", action="store_true", help="include derivation trees")

    q = add("nullform", cmd_nullform, "sampled geometric checks")
    q.add_argument("--samples", type=int, default=10 ** 5)
    q.add_argument("--seed", type=int, default=0)

    q = add("cex", cmd_cex, "counterexample scans and exponent fits")
    q.add_argument("--family")
    for k in ("a1", "a2", "a3", "alpha1", "alpha2", "alpha3"):
        q.add_argument(f"--{k}", type=float)
    q.add_argument("--Ls", default="64..4096")
    q.add_argument("--tol", type=float, default=0.05)

    q = add("solve", cmd_solve, "run the pseudo-spectral solver")
    q.add_argument("--config")

    q = add("identities", cmd_identities, "Dirac algebra identity battery")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--tol", type=float, default=1e-12)

    q = add("norms", cmd_norms, "spacetime norms of a stored array")
    q.add_argument("--input", required=True)
    q.add_argument("--a", type=float, default=0.0)
    q.add_argument("--b", type=float, default=0.0)
    q.add_argument("--variant", choices=["H", "Xplus", "Xminus"])
    q.add_argument("--T", type=float, default=1.0)
    q.add_argument("--box", type=float, default=2 * np.pi)
    q.add_argument("--taper", choices=list(dkg_solver.TAPERS), default="raised-cosine")
    return p


def dispatch(argv=None) -> int:
    p = build_parser()
    try:
        a = p.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return a.fn(a, out)
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_INVALID
    except (ArithmeticError, FloatingPointError, dkg_solver.SolverAbort, cex.QuadratureError) as exc:
        _err(f"numerical abort: {exc}")
        return EXIT_ABORT


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

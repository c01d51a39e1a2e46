"""Admissible (s, r) region, its labelled pieces, and the (sigma, rho) choice."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import List, Optional

from .exact_numbers import EPS, ExtReal, ext

VERTICES = {
    "A": (Fr(0), Fr(1, 2)),
    "B": (Fr(1, 2), Fr(3, 2)),
    "C": (Fr(1, 2), Fr(2, 3)),
    "D": (Fr(1, 2), Fr(1)),
    "E": (Fr(1), Fr(1)),
    "F": (Fr(1), Fr(3, 2)),
    "G": (Fr(1), Fr(2)),
}

REGIONS = ("R1", "R2", "R3", "R4", "BD", "Exterior", "Inadmissible")

# strict inequalities describing the open admissible set
_CONSTRAINTS = (
    ("s > 0", lambda s, r: s > 0),
    ("r > 1/2 + s/3", lambda s, r: r > Fr(1, 2) + s / 3),
    ("r > 1/3 + 2s/3", lambda s, r: r > Fr(1, 3) + 2 * s / 3),
    ("r > s", lambda s, r: r > s),
    ("r < 1/2 + 2s", lambda s, r: r < Fr(1, 2) + 2 * s),
    ("r < 1 + s", lambda s, r: r < 1 + s),
)


@dataclass
class RegionVerdict:
    s: Fr
    r: Fr
    admissible: bool
    failing_constraints: List[str] = field(default_factory=list)
    region: str = "Inadmissible"
    piece: str = "Inadmissible"   # finer label: interior, AD, CD, DF, FE, BG, GF, D, F, G, ...
    sigma: Optional[ExtReal] = None
    rho: Optional[ExtReal] = None

    def to_json(self) -> dict:
        return {
            "s": str(self.s), "r": str(self.r), "admissible": self.admissible,
            "failing_constraints": self.failing_constraints,
            "region": self.region, "piece": self.piece,
            "sigma": None if self.sigma is None else str(self.sigma),
            "rho": None if self.rho is None else str(self.rho),
        }


def _fr(x) -> Fr:
    if isinstance(x, ExtReal):
        if not x.is_rational:
            raise ValueError("region tests need rational coordinates")
        return x.q
    if isinstance(x, float):
        return Fr(str(x))
    return Fr(x)


def admissible(s, r) -> RegionVerdict:
    s, r = _fr(s), _fr(r)
    failing = [name for name, test in _CONSTRAINTS if not test(s, r)]
    ok = not failing
    if not ok:
        # boundary allowances: r = 1 + s for s > 1/2, r = s for s > 1
        if r == 1 + s and s > Fr(1, 2) and failing == ["r < 1 + s"]:
            ok, failing = True, []
        elif r == s and s > 1 and failing == ["r > s"]:
            ok, failing = True, []
    return RegionVerdict(s, r, ok, failing)


def _label(s: Fr, r: Fr):
    half = Fr(1, 2)
    mid = half + s  # the line through A, D, F
    # precedence R3, R4, BD, R1, R2
    if half <= s <= 1 and Fr(1, 3) + 2 * s / 3 < r <= mid:
        if s == half:
            return "R3", "D" if r == mid else "CD"
        if s == 1:
            return "R3", "F" if r == mid else "FE"
        return "R3", "DF" if r == mid else "interior"
    if half < s <= 1 and mid < r <= 1 + s:
        if s == 1:
            return "R4", "G" if r == 1 + s else "GF"
        return "R4", "BG" if r == 1 + s else "interior"
    if s == half and 1 < r < Fr(3, 2):
        return "BD", "BD"
    if 0 < s < half and half + s / 3 < r <= mid:
        return "R1", "AD" if r == mid else "interior"
    if 0 < s < half and mid < r < half + 2 * s:
        return "R2", "interior"
    if s > 1 and s <= r <= 1 + s:
        if r == s:
            return "Exterior", "r=s"
        return "Exterior", "r=1+s" if r == 1 + s else "interior"
    return None, None


def classify_full(s, r) -> RegionVerdict:
    v = admissible(s, r)
    if not v.admissible:
        return v
    region, piece = _label(v.s, v.r)
    if region is None:  # pragma: no cover - the labels cover the admissible set
        raise AssertionError(f"admissible point ({s}, {r}) has no label")
    v.region, v.piece = region, piece
    v.sigma, v.rho = _sigma(region, v.s), Fr(1, 2) + EPS
    return v


def classify(s, r) -> str:
    return classify_full(s, r).region


def _sigma(region: str, s: Fr) -> ExtReal:
    if region == "R1":
        return ext(Fr(1, 2) + s / 3)
    if region == "R2":
        return ext(Fr(1, 2) + s)
    if region == "R3":
        return Fr(5, 6) - s / 3 + EPS
    if region == "R4":
        return Fr(3, 2) - s + 4 * EPS
    if region == "BD":
        return 1 - EPS
    return ext(Fr(3, 4))


def choose_parameters(s, r):
    """(sigma, rho) for an admissible point."""
    v = classify_full(s, r)
    if not v.admissible:
        raise ValueError(f"({s}, {r}) is not admissible: {', '.join(v.failing_constraints)}")
    return v.sigma, v.rho


# --------------------------------------------------------------------------
# necessary conditions for the 4-spinor estimate

COND_NAMES = ("cond1", "cond2", "cond3", "cond4", "cond5", "cond6")


def necessary_conditions(a1, a2, a3, alpha1, alpha2, alpha3) -> List[str]:
    """Names of the violated conditions among cond1..cond6."""
    a1, a2, a3, al1, al2, al3 = (ext(x) for x in (a1, a2, a3, alpha1, alpha2, alpha3))
    half = Fr(1, 2)
    checks = (
        a1 + a2 + a3 >= half,
        (a1 + al1).scale(half) + a2 + a3 >= Fr(3, 4),
        a1 + (a2 + al2).scale(half) + a3 >= Fr(3, 4),
        a1 + a3 >= 0,
        a2 + a3 >= 0,
        a1 + a2 + al3 >= 0,
    )
    return [n for n, ok in zip(COND_NAMES, checks) if not ok]


def kg_exponents(s, r, sigma, rho):
    """Exponent tuple of the Klein-Gordon bilinear estimate."""
    s, r, sigma, rho = ext(s), ext(r), ext(sigma), ext(rho)
    return (s, s, 1 - r, sigma, sigma, 1 - rho - EPS)


def dirac_dual_exponents(s, r, sigma, rho):
    """Exponent tuple of the dualized Dirac bilinear estimate."""
    s, r, sigma, rho = ext(s), ext(r), ext(sigma), ext(rho)
    return (s, -s, r, sigma, 1 - sigma - EPS, rho)


def violated_for_point(s, r, sigma=Fr(3, 4), rho=Fr(1, 2) + EPS) -> dict:
    """Violations of both instantiations at (s, r) with the given (sigma, rho)."""
    return {
        "kg": necessary_conditions(*kg_exponents(s, r, sigma, rho)),
        "dirac": necessary_conditions(*dirac_dual_exponents(s, r, sigma, rho)),
    }


# --------------------------------------------------------------------------
# polygons for plotting

def polygons(s_max=2) -> dict:
    """Vertex lists (s, r) of each labelled piece; the unbounded side is clipped at s_max."""
    s_max = _fr(s_max)
    if s_max <= 1:
        raise ValueError("s_max must exceed 1")
    V = VERTICES
    return {
        "admissible": [V["A"], V["C"], V["E"], (s_max, s_max), (s_max, 1 + s_max), V["G"], V["B"]],
        "R1": [V["A"], V["C"], V["D"]],
        "R2": [V["A"], V["D"], V["B"]],
        "R3": [V["C"], V["E"], V["F"], V["D"]],
        "R4": [V["D"], V["F"], V["G"], V["B"]],
        "Exterior": [V["E"], (s_max, s_max), (s_max, 1 + s_max), V["G"]],
    }


def polygons_csv(s_max=2) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["polygon", "index", "s", "r"])
    for name, pts in polygons(s_max).items():
        for i, (s, r) in enumerate(pts):
            w.writerow([name, i, float(s), float(r)])
    return buf.getvalue()

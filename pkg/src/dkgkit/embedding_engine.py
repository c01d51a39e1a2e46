"""Rule engine for product embeddings of wave-Sobolev spaces H^{a,b}.

A statement ``X . Y -> Z`` reads ||uv||_Z <~ ||u||_X ||v||_Y.  Facts carry a
derivation tree whose leaves are instances of three base product laws and
whose inner nodes are duality/commutativity rearrangements, bilinear
interpolation, Leibniz splits and weight discarding.  ``audit_case`` replays
the reduction route of each of the eleven bilinear pieces at a given (s, r).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exact_numbers import (EPS, HALF, ONE, ZERO, ExtReal, compare, ext, ext_min,
                            first_order_mul, solve_interval, GT, LT)
from . import region_policy

# --------------------------------------------------------------------------
# statements


@dataclass(frozen=True)
class SpaceSpec:
    a: ExtReal
    b: ExtReal
    variant: str = "H"

    def __str__(self):
        if self.a == 0 and self.b == 0:
            return "L2"
        tag = {"H": "H", "Xplus": "X+", "Xminus": "X-"}.get(self.variant, self.variant)
        return f"{tag}^{{{self.a}, {self.b}}}"

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "variant": self.variant}


def H(a, b=0) -> SpaceSpec:
    return SpaceSpec(ext(a), ext(b))


L2 = H(0, 0)


@dataclass(frozen=True)
class Embedding:
    """left . right -> target."""
    left: SpaceSpec
    right: SpaceSpec
    target: SpaceSpec

    def slots(self):
        """Weights of the symmetric trilinear form: factors as-is, target negated."""
        return ((self.left.a, self.left.b), (self.right.a, self.right.b),
                (-self.target.a, -self.target.b))

    @classmethod
    def from_slots(cls, x, y, z) -> "Embedding":
        return cls(H(*x), H(*y), H(-z[0], -z[1]))

    def __str__(self):
        return f"{self.left} . {self.right} -> {self.target}"

    def to_json(self):
        return {"left": self.left.to_json(), "right": self.right.to_json(), "target": self.target.to_json(),
                "text": str(self)}


def emb(left, right, target) -> Embedding:
    """Shorthand: emb((a, alpha), (b, beta), (ta, tb)) with the target exponents as written."""
    return Embedding(H(*left), H(*right), H(*target))


def permute(e: Embedding, perm: Sequence[int]) -> Embedding:
    s = e.slots()
    return Embedding.from_slots(s[perm[0]], s[perm[1]], s[perm[2]])


def dual_statement(e: Embedding, which: int = 0) -> Embedding:
    """Exchange factor ``which`` (0 = left, 1 = right) with the negated target."""
    return permute(e, (2, 1, 0) if which == 0 else (0, 2, 1))


def implies(g: Embedding, f: Embedding) -> bool:
    """g gives f by discarding weights: f's factors are stronger norms, f's target weaker."""
    return (g.left.a <= f.left.a and g.left.b <= f.left.b
            and g.right.a <= f.right.a and g.right.b <= f.right.b
            and g.target.a >= f.target.a and g.target.b >= f.target.b)


def _affine(x0, x1, theta):
    return x0 + first_order_mul(theta, x1 - x0)


def interpolate_statements(e0: Embedding, e1: Embedding, theta) -> Embedding:
    s0, s1 = e0.slots(), e1.slots()
    return Embedding.from_slots(*[(_affine(p[0], q[0], theta), _affine(p[1], q[1], theta))
                                  for p, q in zip(s0, s1)])


# --------------------------------------------------------------------------
# facts with provenance


@dataclass
class EmbeddingFact:
    statement: Embedding
    rule: str
    children: Tuple["EmbeddingFact", ...] = ()
    note: str = ""
    data: Dict = field(default_factory=dict)

    @property
    def left(self):
        return self.statement.left

    @property
    def right(self):
        return self.statement.right

    @property
    def target(self):
        return self.statement.target

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def to_json(self):
        out = {"rule": self.rule, "statement": str(self.statement)}
        if self.note:
            out["note"] = self.note
        if self.data:
            out["data"] = {k: (str(v) if not isinstance(v, (int, bool, str, list, dict)) else v)
                           for k, v in self.data.items()}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    def render(self, indent=0) -> str:
        pad = "  " * indent
        head = f"{pad}[{self.rule}] {self.statement}"
        if self.note:
            head += f"   ({self.note})"
        return "\n".join([head] + [c.render(indent + 1) for c in self.children])


# --------------------------------------------------------------------------
# base product laws


def check_sobolev_product(s1, s2, s3, d) -> bool:
    """H^{s1,d} . H^{s2,d} -> H^{-s3,0}, valid for d > 1/2."""
    s1, s2, s3, d = ext(s1), ext(s2), ext(s3), ext(d)
    if not d > HALF:
        raise ValueError("modulation exponent must exceed 1/2")
    total = s1 + s2 + s3
    common = s1 + s2 > HALF and s1 + s3 >= 0 and s2 + s3 >= 0
    if not common:
        return False
    if total == 1:
        return s1 < 1 and s2 < 1
    return total > 1


def check_wave_product(t1, t2, t3, d1, d2, d3) -> bool:
    """H^{t1,d1} . H^{t2,d2} -> H^{-t3,-d3}."""
    t = [ext(x) for x in (t1, t2, t3)]
    d = [ext(x) for x in (d1, d2, d3)]
    three_halves = ext(Fr(3, 2))
    ts, ds = t[0] + t[1] + t[2], d[0] + d[1] + d[2]
    t_ok = ts > three_halves or (ts == three_halves and all(x != three_halves for x in t))
    d_ok = ds > HALF or (ds == HALF and all(x != HALF for x in d))
    pairs_ok = t[0] + t[1] >= 0 and t[1] + t[2] >= 0 and t[0] + t[2] >= 0
    return t_ok and pairs_ok and d_ok and all(x >= 0 for x in d)


def check_special(e: Embedding) -> bool:
    """H^{1/2+k, 1/2+} . H^{k, 1/2+} -> H^{-1+k, 1/2} for some k > 0."""
    k = e.right.a
    if not k > 0:
        return False
    return (e.left.a == HALF + k and e.target.a == k - 1 and e.target.b == HALF
            and e.left.b > HALF and e.right.b > HALF)


def _leaf(stmt, rule, **data):
    return EmbeddingFact(stmt, rule, data=data)


def weaken(f: EmbeddingFact, target: Embedding) -> EmbeddingFact:
    if f.statement == target:
        return f
    if not implies(f.statement, target):
        raise ValueError(f"{f.statement} does not imply {target}")
    return EmbeddingFact(target, "weaken", (f,), note="discard weights")


def rearrange(f: EmbeddingFact, perm) -> EmbeddingFact:
    perm = tuple(perm)
    if perm == (0, 1, 2):
        return f
    return EmbeddingFact(permute(f.statement, perm), "rearrange", (f,), data={"perm": list(perm)},
                         note=_perm_note(perm))


def _perm_note(perm):
    return {
        (1, 0, 2): "commute factors",
        (2, 1, 0): "duality on left factor",
        (0, 2, 1): "duality on right factor",
        (2, 0, 1): "duality and commute",
        (1, 2, 0): "duality and commute",
    }.get(tuple(perm), "")


def dualize(f: EmbeddingFact, which: int = 0) -> EmbeddingFact:
    """H^{a,al}.H^{b,be} -> H^{-c,-ga} becomes H^{c,ga}.H^{b,be} -> H^{-a,-al} (which=0)."""
    return rearrange(f, (2, 1, 0) if which == 0 else (0, 2, 1))


def interpolate(f0: EmbeddingFact, f1: EmbeddingFact, theta) -> EmbeddingFact:
    theta = ext(theta)
    if theta < 0 or theta > 1:
        raise ValueError("interpolation parameter must lie in [0, 1]")
    stmt = interpolate_statements(f0.statement, f1.statement, theta)
    return EmbeddingFact(stmt, "interpolate", (f0, f1), data={"theta": theta})


def leibniz(f_children: Sequence[EmbeddingFact], stmt: Embedding, gain: int, k) -> EmbeddingFact:
    """Triangle-inequality split: weight k moved onto slot ``gain`` from each of the other two."""
    return EmbeddingFact(stmt, "leibniz", tuple(f_children), data={"gain": gain, "k": ext(k)},
                         note="<zeta_gain>^k <~ <zeta_other1>^k + <zeta_other2>^k")


def leibniz_children(stmt: Embedding, gain: int, k) -> List[Embedding]:
    k = ext(k)
    s = [list(p) for p in stmt.slots()]
    out = []
    for other in range(3):
        if other == gain:
            continue
        t = [list(p) for p in s]
        t[gain][0] = t[gain][0] + k
        t[other][0] = t[other][0] - k
        out.append(Embedding.from_slots(*t))
    return out


def transfer_child(stmt: Embedding, k, to: int = 1) -> Embedding:
    """Move an output weight <xi>^k (k >= 0) onto one factor, valid when both inputs have comparable size."""
    k = ext(k)
    s = [list(p) for p in stmt.slots()]
    s[2][0] = s[2][0] + k
    s[to][0] = s[to][0] - k
    return Embedding.from_slots(*s)


PERMS = [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (2, 0, 1), (1, 2, 0)]


def _inverse(perm):
    inv = [0, 0, 0]
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def _sobolev_leaf(e: Embedding) -> Optional[EmbeddingFact]:
    if e.target.b > 0:
        return None
    d = ext_min(e.left.b, e.right.b)
    if not d > HALF:
        return None
    s1, s2, s3 = e.left.a, e.right.a, -e.target.a
    if not check_sobolev_product(s1, s2, s3, d):
        return None
    inst = Embedding(H(s1, d), H(s2, d), H(-s3, 0))
    return weaken(_leaf(inst, "sobolev-product", s1=s1, s2=s2, s3=s3, d=d), e)


def _wave_leaf(e: Embedding) -> Optional[EmbeddingFact]:
    t = (e.left.a, e.right.a, -e.target.a)
    d = (e.left.b, e.right.b, -e.target.b)
    if not check_wave_product(*t, *d):
        return None
    return _leaf(e, "wave-product", t1=t[0], t2=t[1], t3=t[2], d1=d[0], d2=d[1], d3=d[2])


def _special_leaf(e: Embedding) -> Optional[EmbeddingFact]:
    if not check_special(e):
        return None
    return _leaf(e, "special-product", k=e.right.a)


_BASE = {"sobolev": _sobolev_leaf, "wave": _wave_leaf, "special": _special_leaf}


def prove_base(e: Embedding, methods=("sobolev", "wave", "special")) -> Optional[EmbeddingFact]:
    """Prove ``e`` by one base law, allowing duality/commutativity rearrangements."""
    for perm in PERMS:
        pe = permute(e, perm)
        for m in methods:
            leaf = _BASE[m](pe)
            if leaf is not None:
                return rearrange(leaf, _inverse(perm))
    return None


# --------------------------------------------------------------------------
# interpolated estimates (bie1 .. bie9)

BIE_IDS = ("1", "1e", "2", "3", "4", "5", "6", "7", "8", "9")
THREE_HALVES = Fr(3, 2)
SUB_EPS = [EPS.scale(Fr(1, 10 ** j)) for j in range(0, 7)]


def _m(*xs):
    return ext_min(*xs)


def _plus_ok(p) -> bool:
    return ext(p) > HALF


def bie_condition(k: str, p: Dict) -> bool:
    """Condition table of the k-th interpolated estimate."""
    k = str(k)
    g = {name: ext(v) for name, v in p.items()}
    if "P" in g and not _plus_ok(g["P"]):
        return False
    if k == "1":
        a, al, c = g["a"], g["alpha"], g["c"]
        return a >= 0 and c >= 0 and al >= 0 and _m(a.scale(Fr(1, 2)), al).scale(3) + c > THREE_HALVES
    if k == "1e":
        a, al, c = g["a"], g["alpha"], g["c"]
        return a >= 0 and al >= 0 and c >= HALF and _m(a, al) + c.scale(Fr(1, 2)) > Fr(3, 4)
    if k == "2":
        a, al, be, ga = g["a"], g["alpha"], g["beta"], g["gamma"]
        mm = _m(al, be)
        return a > 1 and al > 0 and be >= 0 and ga >= 0 and a + mm > THREE_HALVES and ga + mm > HALF
    if k == "3":
        a, b, be, c = g["a"], g["b"], g["beta"], g["c"]
        return c >= 0 and be >= 0 and a > 0 and b > 0 and a + b == 1 and c + be > HALF
    if k == "4":
        be, c = g["beta"], g["c"]
        return be >= 0 and c > 0 and c + be > HALF
    if k == "5":
        a, al, b, c = g["a"], g["alpha"], g["b"], g["c"]
        mm = _m(a, al)
        return (a >= 0 and b >= 0 and al >= 0 and c >= HALF
                and mm + b.scale(Fr(2, 3)) > HALF and mm + c.scale(2) > THREE_HALVES)
    if k == "6":
        a, b, be = g["a"], g["b"], g["beta"]
        return b >= 0 and be >= 0 and a >= HALF and a + _m(b, be).scale(2) > THREE_HALVES
    if k == "7":
        a, be = g["a"], g["beta"]
        return be >= 0 and a >= HALF and a + be > 1
    if k == "8":
        a, be, ga, e = g["a"], g["beta"], g["gamma"], g["e"]
        return e > 0 and a >= 0 and be >= 0 and ga >= Fr(-1, 2) and _m(a, be) + ga.scale(Fr(1, 2)) > Fr(1, 4)
    if k == "9":
        be, c = g["beta"], g["c"]
        return be >= 0 and c > HALF and c + be > 1
    raise ValueError(f"unknown interpolated estimate {k!r}")


def bie_statement(k: str, p: Dict) -> Embedding:
    k = str(k)
    g = {name: ext(v) for name, v in p.items()}
    P = g.get("P", HALF + EPS)
    if k in ("1", "1e"):
        return emb((g["a"], g["alpha"]), (0, P), (-g["c"], 0))
    if k == "2":
        return emb((g["a"], g["alpha"]), (0, g["beta"]), (0, -g["gamma"]))
    if k == "3":
        return emb((g["a"], P), (g["b"], g["beta"]), (-g["c"], 0))
    if k == "4":
        return emb((1, P), (0, g["beta"]), (-g["c"], 0))
    if k == "5":
        return emb((g["a"], g["alpha"]), (g["b"], P), (-g["c"], 0))
    if k == "6":
        return emb((g["a"], P), (g["b"], g["beta"]), (0, 0))
    if k == "7":
        return emb((g["a"], P), (HALF, g["beta"]), (0, 0))
    if k == "8":
        return emb((g["a"], P), (g["e"], g["beta"]), (g["e"] - 1, -g["gamma"]))
    if k == "9":
        return emb((HALF, P), (0, g["beta"]), (-g["c"], 0))
    raise ValueError(f"unknown interpolated estimate {k!r}")


def bie_pair(k: str, p: Dict, e: ExtReal) -> Tuple[Embedding, Embedding]:
    """The two endpoint embeddings that are interpolated; e is a small positive parameter."""
    k = str(k)
    g = {name: ext(v) for name, v in p.items()}
    P = g.get("P", HALF + EPS)
    h = HALF
    if k == "1":
        return emb((1 + e, h + e), (0, P), (0, 0)), emb((0, 0), (0, P), (-(THREE_HALVES + e), 0))
    if k == "1e":
        return emb((h + e, h + e), (0, P), (-h, 0)), emb((0, 0), (0, P), (-(THREE_HALVES + e), 0))
    if k == "2":
        return (emb((1 + e, h + e), (0, h + e), (0, 0)),
                emb((THREE_HALVES + e, e), (0, 0), (0, -(h - e))))
    if k == "3":
        return emb((g["a"], P), (g["b"], h + e), (0, 0)), emb((g["a"], P), (g["b"], 0), (-h, 0))
    if k == "4":
        return emb((1, P), (0, h + e), (-e, 0)), emb((1, P), (0, 0), (-h, 0))
    if k == "5":
        return emb((h + e, h + e), (0, P), (-(h - e), 0)), emb((0, 0), (Fr(3, 4), P), (Fr(-3, 4), 0))
    if k == "6":
        return emb((h, P), (h, h + e), (0, 0)), emb((THREE_HALVES + e, P), (0, 0), (0, 0))
    if k == "7":
        return emb((h, P), (h, h + e), (0, 0)), emb((1, P), (h, 0), (0, 0))
    if k == "8":
        e8 = g["e"]
        return (emb((0, P), (e8, 0), (-(1 - e8), -(h + e8))),
                emb((h + e8, P), (e8, h + e), (-(1 - e8), h)))
    if k == "9":
        return emb((h, P), (0, h + e), (-(h + e), 0)), emb((h, P), (0, 0), (-1, 0))
    raise ValueError(f"unknown interpolated estimate {k!r}")


def theta_constraints(e0: Embedding, e1: Embedding, goal: Embedding):
    """Linear conditions on theta under which the interpolant of (e0, e1) implies goal."""
    out = []
    for i, (p, q, g) in enumerate(zip(e0.slots(), e1.slots(), goal.slots())):
        for j in range(2):
            # every slot of the trilinear form: interpolant weight <= goal weight
            out.append((q[j] - p[j], "<=", g[j] - p[j]))
    return out


def find_theta(e0: Embedding, e1: Embedding, goal: Embedding):
    return solve_interval(theta_constraints(e0, e1, goal))


def _bie9_first(P, e) -> Optional[EmbeddingFact]:
    """H^{1/2,P} . H^{0,1/2+e} -> H^{-(1/2+e),0} by a nested interpolation."""
    q0 = emb((HALF + e, P), (0, HALF + e), (-(HALF - e), 0))
    q1 = emb((0, P), (0, HALF + e), (-(THREE_HALVES + e), 0))
    goal = emb((HALF, P), (0, HALF + e), (-(HALF + e), 0))
    f0, f1 = prove_base(q0), prove_base(q1)
    if f0 is None or f1 is None:
        return None
    iv = find_theta(q0, q1, goal)
    if iv is None:
        return None
    fi = interpolate(f0, f1, iv.pick())
    if not implies(fi.statement, goal):
        return None
    out = weaken(fi, goal)
    out.data.setdefault("theta_interval", str(iv))
    return out


def derive_bie(k, params: Dict):
    """Check the k-th condition table and, if it holds, build a derivation.

    Returns (holds, fact).  ``fact`` is None when the table fails, or when
    no interpolation parameter could be found (reported in ``fact.note`` of
    a failed attempt is not possible, so the caller sees (True, None)).
    """
    k = str(k)
    if k not in BIE_IDS:
        raise ValueError(f"unknown interpolated estimate {k!r}")
    key = (k, tuple(sorted((n, ext(v)) for n, v in params.items())))
    if key not in _BIE_MEMO:
        _BIE_MEMO[key] = _derive_bie(k, params)
    return _BIE_MEMO[key]


_BIE_MEMO: Dict = {}


def _derive_bie(k: str, params: Dict):
    if not bie_condition(k, params):
        return False, None
    goal = bie_statement(k, params)
    subs = [EPS.scale(1)] if k == "8" else SUB_EPS
    for e in subs:
        e0, e1 = bie_pair(k, params, e)
        if k == "9":
            f0 = _bie9_first(ext(params.get("P", HALF + EPS)), e)
        else:
            f0 = prove_base(e0)
        f1 = prove_base(e1)
        if f0 is None or f1 is None:
            continue
        iv = find_theta(e0, e1, goal)
        if iv is None:
            continue
        fi = interpolate(f0, f1, iv.pick())
        if not implies(fi.statement, goal):
            continue
        fact = EmbeddingFact(goal, f"bie{k}", (weaken(fi, goal),),
                             data={"params": {n: str(ext(v)) for n, v in params.items()},
                                   "theta_interval": str(iv), "pair_eps": str(e)})
        return True, fact
    return True, None


def _fit_bie(k: str, e: Embedding) -> Optional[Dict]:
    """Read the free parameters of template k off a statement (after a rearrangement)."""
    L, R, T = e.left, e.right, e.target
    h = HALF
    if k in ("1", "1e"):
        if R.a < 0 or not R.b > h or T.b > 0:
            return None
        return {"a": L.a, "alpha": L.b, "c": -T.a, "P": R.b}
    if k == "2":
        if R.a < 0 or T.a > 0:
            return None
        return {"a": L.a, "alpha": L.b, "beta": R.b, "gamma": -T.b}
    if k == "3":
        if not L.b > h or T.b > 0:
            return None
        b = 1 - L.a
        if b > R.a:
            return None
        return {"a": L.a, "b": b, "beta": R.b, "c": -T.a, "P": L.b}
    if k == "4":
        if L.a < 1 or not L.b > h or R.a < 0 or T.b > 0:
            return None
        return {"beta": R.b, "c": -T.a, "P": L.b}
    if k == "5":
        if not R.b > h or T.b > 0:
            return None
        return {"a": L.a, "alpha": L.b, "b": R.a, "c": -T.a, "P": R.b}
    if k == "6":
        if not L.b > h or T.a > 0 or T.b > 0:
            return None
        return {"a": L.a, "b": R.a, "beta": R.b, "P": L.b}
    if k == "7":
        if not L.b > h or R.a < h or T.a > 0 or T.b > 0:
            return None
        return {"a": L.a, "beta": R.b, "P": L.b}
    if k == "8":
        if not L.b > h or not R.a > 0 or R.a - 1 < T.a:
            return None
        return {"a": L.a, "e": R.a, "beta": R.b, "gamma": -T.b, "P": L.b}
    if k == "9":
        if L.a < h or not L.b > h or R.a < 0 or T.b > 0:
            return None
        return {"beta": R.b, "c": -T.a, "P": L.b}
    raise ValueError(k)


def prove_bie(e: Embedding, k) -> Optional[EmbeddingFact]:
    """Prove ``e`` from the k-th interpolated estimate, allowing rearrangements."""
    k = str(k)
    for perm in PERMS:
        pe = permute(e, perm)
        params = _fit_bie(k, pe)
        if params is None:
            continue
        ok, fact = derive_bie(k, params)
        if not ok or fact is None or not implies(fact.statement, pe):
            continue
        return rearrange(weaken(fact, pe), _inverse(perm))
    return None


def prove(e: Embedding, method: str) -> Optional[EmbeddingFact]:
    if method.startswith("bie"):
        return prove_bie(e, method[3:])
    return prove_base(e, (method,))


# --------------------------------------------------------------------------
# verification


def verify(f: EmbeddingFact) -> bool:
    """Re-check every node of a derivation tree."""
    try:
        return _verify(f)
    except (ValueError, ArithmeticError):
        return False


def _verify(f: EmbeddingFact) -> bool:
    st, ch = f.statement, f.children
    if not all(_verify(c) for c in ch):
        return False
    r = f.rule
    if r == "sobolev-product":
        d = f.data["d"]
        return (st.left.b == d and st.right.b == d and st.target.b == 0
                and check_sobolev_product(st.left.a, st.right.a, -st.target.a, d))
    if r == "wave-product":
        return check_wave_product(st.left.a, st.right.a, -st.target.a, st.left.b, st.right.b, -st.target.b)
    if r == "special-product":
        return check_special(st)
    if r == "weaken":
        return implies(ch[0].statement, st)
    if r == "rearrange":
        return permute(ch[0].statement, f.data["perm"]) == st
    if r == "interpolate":
        th = f.data["theta"]
        return 0 <= th <= 1 and interpolate_statements(ch[0].statement, ch[1].statement, th) == st
    if r == "leibniz":
        if f.data["k"] < 0:
            return False
        kids = leibniz_children(st, f.data["gain"], f.data["k"])
        return len(ch) == 2 and all(implies(c.statement, kd) for c, kd in zip(ch, kids))
    if r == "transfer":
        if f.data["k"] < 0:
            return False
        return implies(ch[0].statement, transfer_child(st, f.data["k"], f.data.get("to", 1)))
    if r == "symmetry":
        return len(ch) == 1
    if r.startswith("bie"):
        k = r[3:]
        params = {n: _parse_param(v) for n, v in f.data["params"].items()}
        return (bie_condition(k, params) and bie_statement(k, params) == st
                and len(ch) == 1 and implies(ch[0].statement, st))
    return False


def _parse_param(v):
    from .exact_numbers import parse
    return parse(v) if isinstance(v, str) else ext(v)


# --------------------------------------------------------------------------
# case audit

CASE_IDS = ("I+1", "I+2", "I+3", "I-1", "I-2", "I-3", "J+1", "J+2", "J+3", "J-1", "J-2", "J-3")
# I-3 follows from I-2 by symmetry and is not audited separately
AUDIT_IDS = ("I+1", "I+2", "I+3", "I-1", "I-2", "J+1", "J+2", "J+3", "J-1", "J-2", "J-3")


@dataclass
class AuditReport:
    case: str
    s: Fr
    r: Fr
    region: str
    piece: str
    sigma: ExtReal
    rho: ExtReal
    required: Optional[Embedding]
    verdict: str
    route: str = ""
    derivation: Optional[EmbeddingFact] = None
    detail: str = ""
    params: Dict = field(default_factory=dict)

    @property
    def proven(self) -> bool:
        return self.verdict == "proven"

    def to_json(self):
        return {
            "case": self.case, "s": str(self.s), "r": str(self.r), "region": self.region,
            "piece": self.piece, "sigma": str(self.sigma), "rho": str(self.rho),
            "required": None if self.required is None else str(self.required),
            "verdict": self.verdict, "route": self.route, "detail": self.detail,
            "params": {k: str(v) for k, v in self.params.items()},
            "derivation": None if self.derivation is None else self.derivation.to_json(),
        }


class _Ctx:
    def __init__(self, s, r, verdict, sigma):
        self.s, self.r = ext(s), ext(r)
        self.sq, self.rq = Fr(s), Fr(r)
        self.region, self.piece = verdict.region, verdict.piece
        self.sigma = sigma
        self.rho = HALF + EPS
        self.params = {}

    def delta(self, rho_val, lo=Fr(0), hi=Fr(1, 2), scale=Fr(1, 16)):
        cands = [rho_val]
        if lo is not None:
            cands.append(self.sq - lo)
        if hi is not None:
            cands.append(hi - self.sq)
        d = min(cands) * scale
        self.params["delta"] = d
        return d


def exterior_sigma(s, r) -> ExtReal:
    """sigma for s > 1: 3/4 when r >= s + 1/2, closer to 1/2 as r approaches s."""
    s, r = Fr(s), Fr(r)
    return ext(min(Fr(3, 4), Fr(1, 2) + (r - s) / 2)) if r > s else ext(Fr(3, 4))


def audit_parameters(s, r):
    """(RegionVerdict, sigma, rho) used by the audit."""
    v = region_policy.classify_full(s, r)
    if not v.admissible:
        raise ValueError(f"({s}, {r}) is not admissible: {', '.join(v.failing_constraints)}")
    sigma = v.sigma
    if v.region == "Exterior":
        sigma = exterior_sigma(v.s, v.r)
    return v, sigma, v.rho


def _segment(family: Callable, s, s0, s1, m0: Callable, m1: Callable):
    f0 = m0(family(s0))
    f1 = m1(family(s1))
    if f0 is None or f1 is None:
        return None
    theta = (Fr(s) - Fr(s0)) / (Fr(s1) - Fr(s0))
    fi = interpolate(f0, f1, theta)
    goal = family(s)
    if not implies(fi.statement, goal):
        return None
    return weaken(fi, goal)


def _by(method):
    return lambda e: prove(e, method)


def _split_then(method, gain, k):
    def run(e):
        kids = leibniz_children(e, gain, k)
        proofs = [prove(kd, method) for kd in kids]
        if any(p is None for p in proofs):
            return None
        return leibniz(proofs, e, gain, k)
    return run


def _case_i1(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((1 + s - r, sg), (s + HALF - 2 * EPS, sg), (0, 0))
    return req, "sobolev-product", prove(req, "sobolev")


def _case_i2(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((1 + s - r, 0), (HALF + s - 3 * EPS, sg), (0, -HALF - EPS))
    p = prove_base(dual_statement(req, 0), ("sobolev",))
    return req, "duality + sobolev-product", None if p is None else dualize(p, 0)


def _case_i3(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((1 + s - r, sg), (HALF + s - 3 * EPS, sg - HALF), (0, -HALF - EPS))
    e3 = dual_statement(req, 1)   # H^{1+s-r,sg} . H^{0,1/2+eps} -> H^{-1/2-s+3eps, 1/2-sg}

    def finish(p):
        return None if p is None else dualize(p, 1)

    if c.region == "Exterior":
        w = emb((0, sg), (0, HALF + EPS), (e3.target.a, e3.target.b))
        p = prove(w, "wave")
        return req, "drop spatial weight + wave-product", finish(None if p is None else weaken(p, e3))
    if c.piece in ("DF", "F"):
        return req, "wave-product", finish(prove(e3, "wave"))
    if c.region == "R2":
        rho_v = Fr(1, 2) + 2 * c.sq - c.rq
        c.params["varrho"] = rho_v
        d = c.delta(rho_v)

        def fam(t):
            t = ext(t)
            return emb((HALF - t + rho_v, HALF + t), (0, HALF + EPS), (-HALF - t + 3 * EPS, -t))
        p = _segment(fam, c.sq, d, Fr(1, 2) - d, _by("sobolev"), _by("bie1"))
        return req, "interpolate[s=delta: sobolev-product, s=1/2-delta: duality + bie1]", finish(p)
    if c.piece in ("AD", "D"):
        return req, "bie1e", finish(prove(e3, "bie1e"))
    if c.region == "R4":
        w = emb((0, sg), (0, HALF + EPS), (e3.target.a, e3.target.b))
        p = prove(w, "bie2")
        return req, "drop spatial weight + duality + bie2", finish(None if p is None else weaken(p, e3))
    if c.region == "BD":
        return req, "duality + bie1", finish(prove(e3, "bie1"))
    return req, "sobolev-product", finish(prove(e3, "sobolev"))


def _case_im1(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((0, sg), (HALF + 2 * s - 2 * EPS, sg), (-1 + r, 0))
    if c.rq <= 1:
        return req, "sobolev-product", prove(req, "sobolev")
    k = r - 1
    child = transfer_child(req, k, 1)
    p = prove(child, "sobolev")
    if p is None:
        return req, "transfer + sobolev-product", None
    return req, "transfer + sobolev-product", EmbeddingFact(
        req, "transfer", (p,), data={"k": k, "to": 1},
        note="output frequency small against comparable inputs")


def _case_im2(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((0, 0), (HALF + 2 * s - 3 * EPS, sg), (-1 + r, -HALF - EPS))
    if c.rq < 1:
        p = prove_base(dual_statement(req, 0), ("sobolev",))
        return req, "duality + sobolev-product", None if p is None else dualize(p, 0)
    k = r - 1
    child = transfer_child(req, k, 1)
    p = prove_base(dual_statement(child, 0), ("sobolev",))
    if p is None:
        return req, "transfer + duality + sobolev-product", None
    return req, "transfer + duality + sobolev-product", EmbeddingFact(
        req, "transfer", (dualize(p, 0),), data={"k": k, "to": 1},
        note="output frequency small against comparable inputs")


def _case_im3(c: _Ctx):
    req, route, p = _case_im2(c)
    if p is None:
        return req, "symmetry with I-2", None
    return req, "symmetry with I-2", EmbeddingFact(req, "symmetry", (p,), note="exchange the roles of the two inputs")


def _case_j1(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((HALF + s, sg), (HALF - s, 1 - sg - EPS), (HALF - r, 0))
    if c.region == "Exterior":
        w = emb((HALF + s, sg), (HALF - s, 1 - sg - EPS), (HALF - s, 0))
        p = prove(w, "wave")
        return req, "weaken target + wave-product", None if p is None else weaken(p, req)
    if c.region in ("R1", "R2"):
        return req, "bie3", prove(req, "bie3")
    if c.region == "R3":
        rho_v = c.rq - Fr(1, 3) - 2 * c.sq / 3
        c.params["varrho"] = rho_v

        def fam(t):
            t = ext(t)
            return emb((HALF + t, Fr(5, 6) - t.scale(Fr(1, 3)) + EPS), (HALF - t, Fr(1, 6) + t.scale(Fr(1, 3)) - 2 * EPS),
                       (Fr(1, 6) - t.scale(Fr(2, 3)) - rho_v, 0))
        p = _segment(fam, c.sq, Fr(1, 2), Fr(1), _by("bie4"), _by("wave"))
        return req, "interpolate[s=1/2: bie4, s=1: wave-product]", p
    return req, "wave-product", prove(req, "wave")


def _case_j2(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((-HALF + r, HALF + EPS), (HALF - s, 1 - sg - EPS), (-HALF - s, HALF - sg))
    if c.region == "Exterior":
        w = emb((-HALF + s, HALF + EPS), (HALF - s, 1 - sg - EPS), (-HALF - s, HALF - sg))
        p = prove(w, "wave")
        return req, "weaken factor + wave-product", None if p is None else weaken(p, req)
    if c.region == "R1":
        rho_v = c.rq - Fr(1, 2) - c.sq / 3
        c.params["varrho"] = rho_v
        d = c.delta(rho_v)

        def fam(t):
            t = ext(t)
            return emb((t.scale(Fr(1, 3)) + rho_v, HALF + EPS), (HALF - t, HALF - t.scale(Fr(1, 3)) - EPS),
                       (-HALF - t, -t.scale(Fr(1, 3))))
        p = _segment(fam, c.sq, d, Fr(1, 2) - d, _by("bie5"), _by("bie8"))
        return req, "interpolate[s=delta: bie5, s=1/2-delta: bie8]", p
    if c.region == "R2":
        rho_v = c.rq - Fr(1, 2) - c.sq
        c.params["varrho"] = rho_v
        d = c.delta(rho_v)

        def fam(t):
            t = ext(t)
            return emb((t + rho_v, HALF + EPS), (HALF - t, HALF - t - EPS), (-HALF - t, -t))
        p = _segment(fam, c.sq, d, Fr(1, 2) - d, _by("bie5"), _by("wave"))
        return req, "interpolate[s=delta: bie5, s=1/2-delta: wave-product]", p
    if c.region == "R3":
        rho_v = c.rq - Fr(1, 3) - 2 * c.sq / 3
        c.params["varrho"] = rho_v
        d = c.delta(rho_v, lo=None, hi=None)

        def fam(t):
            t = ext(t)
            return emb((Fr(-1, 6) + t.scale(Fr(2, 3)) + rho_v, HALF + EPS),
                       (HALF - t, Fr(1, 6) + t.scale(Fr(1, 3)) - 2 * EPS),
                       (-HALF - t, Fr(-1, 3) + t.scale(Fr(1, 3)) - EPS))
        p = _segment(fam, c.sq, Fr(1, 2), Fr(1), _split_then("bie8", 1, d), _by("wave"))
        return req, "interpolate[s=1/2: leibniz + bie8 (x2), s=1: wave-product]", p
    return req, "wave-product", prove(req, "wave")


def _case_j3(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((HALF + s, sg), (-HALF + r, HALF + EPS), (-1 + s + sg + EPS, 0))
    return req, "sobolev-product", prove(req, "sobolev")


def _case_jm1(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((HALF, sg), (0, 1 - sg - EPS), (-r, 0))
    if c.region == "Exterior":
        w = emb((HALF, sg), (0, 1 - sg - EPS), (-s, 0))
        p = prove(w, "wave")
        return req, "weaken target + wave-product", None if p is None else weaken(p, req)
    if c.region in ("R1", "R2", "R3"):
        return req, "bie9", prove(req, "bie9")
    return req, "wave-product", prove(req, "wave")


def _case_jm2(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((r, HALF + EPS), (HALF, 1 - sg - EPS), (0, 0))
    if c.region == "Exterior":
        w = emb((s, HALF + EPS), (HALF, 1 - sg - EPS), (0, 0))
        p = prove(w, "wave")
        return req, "weaken factor + wave-product", None if p is None else weaken(p, req)
    if c.region == "R1":
        rho_v = c.rq - Fr(1, 2) - c.sq / 3
        c.params["varrho"] = rho_v
        d = c.delta(rho_v)

        def fam(t):
            t = ext(t)
            return emb((HALF + t.scale(Fr(1, 3)) + rho_v, HALF + EPS), (HALF, HALF - t.scale(Fr(1, 3)) - EPS), (0, 0))
        p = _segment(fam, c.sq, d, Fr(1, 2) - d, _by("bie6"), _by("bie7"))
        return req, "interpolate[s=delta: bie6, s=1/2-delta: bie7]", p
    if c.region == "R2":
        rho_v = c.rq - Fr(1, 2) - c.sq
        c.params["varrho"] = rho_v
        d = c.delta(rho_v)

        def fam(t):
            t = ext(t)
            return emb((HALF + t + rho_v, HALF + EPS), (HALF, HALF - t - EPS), (0, 0))
        p = _segment(fam, c.sq, d, Fr(1, 2) - d, _by("bie6"), _by("wave"))
        return req, "interpolate[s=delta: bie6, s=1/2-delta: wave-product]", p
    if c.region == "R3":
        return req, "bie7", prove(req, "bie7")
    return req, "wave-product", prove(req, "wave")


def _case_jm3(c: _Ctx):
    s, r, sg = c.s, c.r, c.sigma
    req = emb((r, HALF + EPS), (1 - sg - EPS, sg), (0, 0))
    return req, "sobolev-product", prove(req, "sobolev")


_ROUTES = {
    "I+1": _case_i1, "I+2": _case_i2, "I+3": _case_i3,
    "I-1": _case_im1, "I-2": _case_im2, "I-3": _case_im3,
    "J+1": _case_j1, "J+2": _case_j2, "J+3": _case_j3,
    "J-1": _case_jm1, "J-2": _case_jm2, "J-3": _case_jm3,
}


def _norm_case(case_id: str) -> str:
    cid = case_id.replace("−", "-").replace("_", "").upper().replace(" ", "")
    if cid not in _ROUTES:
        raise ValueError(f"unknown case id {case_id!r}")
    return cid


def audit_case(case_id: str, s, r) -> AuditReport:
    cid = _norm_case(case_id)
    s, r = _rat(s), _rat(r)
    v, sigma, rho = audit_parameters(s, r)
    ctx = _Ctx(s, r, v, sigma)
    try:
        req, route, proof = _ROUTES[cid](ctx)
    except (ValueError, ArithmeticError) as exc:
        return AuditReport(cid, s, r, v.region, v.piece, sigma, rho, None, "failed",
                           detail=f"{type(exc).__name__}: {exc}", params=ctx.params)
    if proof is None:
        return AuditReport(cid, s, r, v.region, v.piece, sigma, rho, req, "failed", route,
                           detail="cited route does not close", params=ctx.params)
    if proof.statement != req or not verify(proof):
        return AuditReport(cid, s, r, v.region, v.piece, sigma, rho, req, "failed", route, proof,
                           detail="derivation failed re-verification", params=ctx.params)
    return AuditReport(cid, s, r, v.region, v.piece, sigma, rho, req, "proven", route, proof,
                       params=ctx.params)


def _rat(x) -> Fr:
    if isinstance(x, float):
        return Fr(str(x))
    if isinstance(x, ExtReal):
        if not x.is_rational:
            raise ValueError("audit coordinates must be rational")
        return x.q
    return Fr(x)


def audit_point(s, r, cases=AUDIT_IDS) -> List[AuditReport]:
    return [audit_case(c, s, r) for c in cases]


def blanket_i3_check(s, r) -> Optional[bool]:
    """The claim that the I+3 embedding holds for r < 1/2 + s by the Sobolev law alone (None if r >= 1/2+s)."""
    v, sigma, _ = audit_parameters(s, r)
    s, r = ext(_rat(s)), ext(_rat(r))
    if not r < s + HALF:
        return None
    e3 = emb((1 + s - r, sigma), (0, HALF + EPS), (-HALF - s + 3 * EPS, HALF - sigma))
    return prove(e3, "sobolev") is not None


def default_grid(n_min=210, denom=24, s_max=2, per_piece=24):
    """Rational admissible points covering every labelled piece, at least n_min of them."""
    pts = []
    seen = set()
    for i in range(1, s_max * denom + 1):
        s = Fr(i, denom)
        for j in range(0, (s_max + 1) * denom * 2 + 1):
            r = Fr(j, denom)
            v = region_policy.classify_full(s, r)
            if v.admissible and (s, r) not in seen:
                seen.add((s, r))
                pts.append((s, r, v.region, v.piece))
    # thin out uniformly while keeping every piece represented
    by_piece = {}
    for p in pts:
        by_piece.setdefault((p[2], p[3]), []).append(p)
    chosen = []
    for key in sorted(by_piece):
        group = by_piece[key]
        chosen.extend(group[:: max(1, -(-len(group) // per_piece))])
    if len(chosen) < n_min:
        extra = [p for p in pts if p not in chosen]
        step = max(1, len(extra) // (n_min - len(chosen)))
        chosen.extend(extra[::step][: n_min - len(chosen)])
    return [(p[0], p[1]) for p in chosen]


# --------------------------------------------------------------------------
# spot checks of explicit interpolation parameters

def sobolev_case2_interpolation(s3, d=None):
    """Interpolation behind the Sobolev law for 0 < s3 < 1/2, s1 <= 0.

    Endpoints: H^{0,d}.H^{1+eps,d} -> L2 and H^{0,d}.H^{1/2+eps,d} -> H^{-1/2,0};
    the goal H^{0,d}.H^{1+eps-s3,d} -> H^{-s3,0}.  Returns (interval, fact).
    """
    d = HALF + EPS if d is None else ext(d)
    s3 = ext(s3)
    e0 = emb((0, d), (1 + EPS, d), (0, 0))
    e1 = emb((0, d), (HALF + EPS, d), (-HALF, 0))
    goal = emb((0, d), (1 + EPS - s3, d), (-s3, 0))
    f0, f1 = prove_base(e0), prove_base(e1)
    iv = find_theta(e0, e1, goal)
    if iv is None or f0 is None or f1 is None:
        return iv, None
    return iv, weaken(interpolate(f0, f1, iv.pick()), goal)


def bie9_inner_interval(P=None, e=EPS):
    """theta-interval of the nested interpolation inside bie9."""
    P = HALF + EPS if P is None else ext(P)
    q0 = emb((HALF + e, P), (0, HALF + e), (-(HALF - e), 0))
    q1 = emb((0, P), (0, HALF + e), (-(THREE_HALVES + e), 0))
    goal = emb((HALF, P), (0, HALF + e), (-(HALF + e), 0))
    return find_theta(q0, q1, goal)

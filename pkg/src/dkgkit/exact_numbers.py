"""Rationals extended by three ordered infinitesimals rho >> delta >> eps.

An ExtReal is ``q + c_rho*rho + c_delta*delta + c_eps*eps``.  The order is
lexicographic on the component tuple, so a strict inequality that only holds
"for eps small enough" is decided exactly.  Products of two infinitesimal
quantities are second order and are not representable; ``*`` refuses them.
``first_order_mul`` / ``first_order_div`` exist for the few places that
knowingly discard second-order terms (interpolation parameters that are
themselves infinitesimal).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Tuple, Union

Number = Union[int, Fraction, "ExtReal"]

LT, EQ, GT = -1, 0, 1

_NAMES = ("rho", "delta", "eps")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are only accepted when they are exact short decimals
        return Fraction(str(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


@dataclass(frozen=True, eq=False)
class ExtReal:
    q: Fraction = Fraction(0)
    c_rho: Fraction = Fraction(0)
    c_delta: Fraction = Fraction(0)
    c_eps: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("q", "c_rho", "c_delta", "c_eps"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, q, r, d, e) -> "ExtReal":
        # components already Fractions: skip coercion (hot path of the audit)
        out = object.__new__(cls)
        object.__setattr__(out, "q", q)
        object.__setattr__(out, "c_rho", r)
        object.__setattr__(out, "c_delta", d)
        object.__setattr__(out, "c_eps", e)
        return out

    @classmethod
    def of(cls, x) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        return cls(_frac(x))

    @property
    def parts(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.q, self.c_rho, self.c_delta, self.c_eps)

    @property
    def is_rational(self) -> bool:
        return self.c_rho == 0 and self.c_delta == 0 and self.c_eps == 0

    @property
    def standard(self) -> Fraction:
        return self.q

    @property
    def infinitesimal(self) -> "ExtReal":
        return ExtReal(0, self.c_rho, self.c_delta, self.c_eps)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return ExtReal._raw(self.q + o.q, self.c_rho + o.c_rho, self.c_delta + o.c_delta, self.c_eps + o.c_eps)

    __radd__ = __add__

    def __neg__(self):
        return ExtReal._raw(-self.q, -self.c_rho, -self.c_delta, -self.c_eps)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational:
            return self.scale(o.q)
        if self.is_rational:
            return o.scale(self.q)
        raise ArithmeticError("product of two infinitesimal-carrying values is second order")

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not o.is_rational:
            raise ArithmeticError("division by a non-rational value; use first_order_div")
        if o.q == 0:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / o.q)

    def scale(self, c) -> "ExtReal":
        c = _frac(c)
        return ExtReal._raw(c * self.q, c * self.c_rho, c * self.c_delta, c * self.c_eps)

    # order --------------------------------------------------------------
    def _cmp(self, other) -> int:
        o = _coerce(other)
        if o is None:
            raise TypeError(f"cannot compare ExtReal with {type(other).__name__}")
        return compare(self, o)

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.parts == o.parts

    def __hash__(self):
        if self.is_rational:
            return hash(self.q)
        return hash(self.parts)

    def __lt__(self, other):
        return self._cmp(other) == LT

    def __le__(self, other):
        return self._cmp(other) != GT

    def __gt__(self, other):
        return self._cmp(other) == GT

    def __ge__(self, other):
        return self._cmp(other) != LT

    def sign(self) -> int:
        for x in self.parts:
            if x:
                return 1 if x > 0 else -1
        return 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.sign() != 0

    # evaluation and rendering ------------------------------------------
    def evaluate(self, rho=0, delta=0, eps=0) -> Fraction:
        """Substitute concrete rationals for the infinitesimals."""
        return self.q + self.c_rho * _frac(rho) + self.c_delta * _frac(delta) + self.c_eps * _frac(eps)

    def __float__(self):
        return float(self.q)

    def __str__(self):
        terms = []
        if self.q != 0:
            terms.append(_fmt(self.q))
        for c, name in zip(self.parts[1:], _NAMES):
            if c == 0:
                continue
            mag = abs(c)
            body = name if mag == 1 else f"{_fmt(mag)}*{name}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(("+ " if c > 0 else "- ") + body)
        return " ".join(terms) if terms else "0"

    def __repr__(self):
        return f"ExtReal({self})"

    def to_json(self) -> dict:
        return {"q": str(self.q), "rho": str(self.c_rho), "delta": str(self.c_delta), "eps": str(self.c_eps)}


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _coerce(x) -> Optional[ExtReal]:
    if isinstance(x, ExtReal):
        return x
    try:
        return ExtReal(_frac(x))
    except TypeError:
        return None


ZERO = ExtReal(0)
ONE = ExtReal(1)
HALF = ExtReal(Fraction(1, 2))
RHO = ExtReal(0, 1, 0, 0)
DELTA = ExtReal(0, 0, 1, 0)
EPS = ExtReal(0, 0, 0, 1)


def ext(x) -> ExtReal:
    return ExtReal.of(x)


def combine(x, y, cx, cy) -> ExtReal:
    """cx*x + cy*y for rational cx, cy."""
    return ext(x).scale(cx) + ext(y).scale(cy)


def compare(x, y) -> int:
    """Lexicographic comparison; returns LT, EQ or GT."""
    x, y = ext(x), ext(y)
    for a, b in zip(x.parts, y.parts):
        if a != b:
            return LT if a < b else GT
    return EQ


def first_order_mul(x, y) -> ExtReal:
    """Product with second-order infinitesimal terms dropped."""
    x, y = ext(x), ext(y)
    return ExtReal(
        x.q * y.q,
        x.q * y.c_rho + y.q * x.c_rho,
        x.q * y.c_delta + y.q * x.c_delta,
        x.q * y.c_eps + y.q * x.c_eps,
    )


def first_order_div(x, y) -> ExtReal:
    """x / y expanded to first order; y must have a nonzero standard part."""
    x, y = ext(x), ext(y)
    if y.q == 0:
        raise ZeroDivisionError("first-order quotient needs a nonzero standard part in the divisor")
    q = x.q / y.q
    return ExtReal(
        q,
        (x.c_rho - q * y.c_rho) / y.q,
        (x.c_delta - q * y.c_delta) / y.q,
        (x.c_eps - q * y.c_eps) / y.q,
    )


def ext_min(*xs) -> ExtReal:
    return min((ext(x) for x in xs), key=_Key)


def ext_max(*xs) -> ExtReal:
    return max((ext(x) for x in xs), key=_Key)


class _Key:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return compare(self.v, other.v) == LT


# ---------------------------------------------------------------------------
# one-dimensional feasibility in theta

@dataclass(frozen=True)
class Constraint:
    """coef*theta <op> rhs with op in {'<=', '<', '>=', '>', '=='}."""
    coef: ExtReal
    op: str
    rhs: ExtReal

    def holds(self, theta) -> bool:
        lhs = first_order_mul(self.coef, theta)
        c = compare(lhs, self.rhs)
        return {"<=": c != GT, "<": c == LT, ">=": c != LT, ">": c == GT, "==": c == EQ}[self.op]


def constraint(coef, op, rhs) -> Constraint:
    if op not in ("<=", "<", ">=", ">", "=="):
        raise ValueError(f"unknown relation {op!r}")
    return Constraint(ext(coef), op, ext(rhs))


@dataclass(frozen=True)
class Interval:
    lo: ExtReal
    hi: ExtReal
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, t) -> bool:
        c_lo, c_hi = compare(t, self.lo), compare(t, self.hi)
        ok_lo = c_lo == GT or (c_lo == EQ and not self.lo_open)
        ok_hi = c_hi == LT or (c_hi == EQ and not self.hi_open)
        return ok_lo and ok_hi

    def pick(self) -> ExtReal:
        """A representative point, preferring closed endpoints and simple values."""
        if not self.lo_open:
            return self.lo
        if not self.hi_open:
            return self.hi
        return (self.lo + self.hi).scale(Fraction(1, 2))

    def __str__(self):
        return f"{'(' if self.lo_open else '['}{self.lo}, {self.hi}{')' if self.hi_open else ']'}"


def solve_interval(constraints: Iterable) -> Optional[Interval]:
    """Intersect linear constraints in theta with [0, 1].

    Each constraint is a ``Constraint`` or a tuple ``(coef, op, rhs)``.
    Bounds ``rhs/coef`` with an infinitesimal coefficient are expanded to
    first order.  Returns None when the intersection is empty.
    """
    lo, lo_open = ZERO, False
    hi, hi_open = ONE, False
    for c in constraints:
        if not isinstance(c, Constraint):
            c = constraint(*c)
        a, op, b = c.coef, c.op, c.rhs
        if a.sign() == 0:
            if not c.holds(ZERO):
                return None
            continue
        if a.q == 0:
            # a*theta is infinitesimal for every theta in [0,1]
            if b.q != 0:
                if not c.holds(ZERO) or not c.holds(ONE):
                    return None
                continue
            raise ArithmeticError("ratio of two infinitesimals is outside the number system")
        bound = first_order_div(b, a)
        if op == "==":
            bounds = [(bound, ">=", False), (bound, "<=", False)]
        else:
            flip = a.sign() < 0
            upper = op in ("<=", "<")
            if flip:
                upper = not upper
            bounds = [(bound, "<=" if upper else ">=", op in ("<", ">"))]
        for v, kind, strict in bounds:
            if kind == "<=":
                cv = compare(v, hi)
                if cv == LT:
                    hi, hi_open = v, strict
                elif cv == EQ:
                    hi_open = hi_open or strict
            else:
                cv = compare(v, lo)
                if cv == GT:
                    lo, lo_open = v, strict
                elif cv == EQ:
                    lo_open = lo_open or strict
    c = compare(lo, hi)
    if c == GT or (c == EQ and (lo_open or hi_open)):
        return None
    return Interval(lo, hi, lo_open, hi_open)


def parse(text: str) -> ExtReal:
    """Parse strings such as '1/2 + eps', '3/2 - s', '-2*delta + 1'."""
    s = text.replace(" ", "").replace("−", "-")
    if not s:
        raise ValueError("empty expression")
    out = ZERO
    toks = []
    buf = ""
    for ch in s:
        if ch in "+-" and buf and buf[-1] not in "*":
            toks.append(buf)
            buf = ch
        else:
            buf += ch
    toks.append(buf)
    names = {"rho": RHO, "delta": DELTA, "eps": EPS, "epsilon": EPS, "ϱ": RHO, "δ": DELTA, "ε": EPS}
    for tok in toks:
        if tok in ("", "+", "-"):
            raise ValueError(f"malformed expression {text!r}")
        sign = -1 if tok[0] == "-" else 1
        body = tok.lstrip("+-")
        if "*" in body:
            coef, name = body.split("*", 1)
            if name not in names:
                raise ValueError(f"unknown symbol {name!r} in {text!r}")
            out = out + names[name].scale(sign * _frac(coef))
        elif body in names:
            out = out + names[body].scale(sign)
        else:
            out = out + ExtReal(sign * Fraction(body))
    return out


"""Monomial (toric) valuations on PuiseuxPoly and the finite window of attainable values."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

from .errors import DimensionMismatch, NonpositivePi, ValidationError, ZeroDenominator
from .perfring import PuiseuxPoly, fmt_fraction


@total_ordering
class _Infinity:
    """Value of the zero polynomial; larger than every rational."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        return False

    def __gt__(self, other) -> bool:
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ValueError("inf - inf is undefined")
        return self

    def __hash__(self) -> int:
        return hash("molly-inf")

    def __repr__(self) -> str:
        return "inf"

    __str__ = __repr__


INF = _Infinity()


def fmt_value(x) -> str:
    return "inf" if x is INF else fmt_fraction(Fraction(x))


@dataclass(frozen=True)
class ToricValuation:
    weights: tuple

    def __init__(self, weights: Sequence):
        ws = []
        for w in weights:
            if isinstance(w, bool) or isinstance(w, float):
                raise ValidationError(f"weights must be exact rationals, got {w!r}")
            try:
                f = Fraction(w)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"bad weight {w!r}") from exc
            if f <= 0:
                raise ValidationError(f"weights must be positive, got {fmt_fraction(f)}")
            ws.append(f)
        if not ws:
            raise ValidationError("at least one weight required")
        object.__setattr__(self, "weights", tuple(ws))

    @property
    def e(self) -> int:
        return len(self.weights)

    def of_exps(self, exps) -> Fraction:
        return sum((k * u for k, u in zip(exps, self.weights)), Fraction(0))

    def __call__(self, f: PuiseuxPoly):
        return val(self, f)

    def to_json(self) -> list[str]:
        return [fmt_fraction(w) for w in self.weights]


def val(v: ToricValuation, f: PuiseuxPoly):
    if f.e != len(v.weights):
        raise DimensionMismatch(f"valuation has {len(v.weights)} weights, polynomial has {f.e} variables")
    if not f:
        return INF
    w = v.weights
    return min(sum((k * u for k, u in zip(exps, w)), Fraction(0)) for exps in f._terms)


def val_fraction(v: ToricValuation, num: PuiseuxPoly, den: PuiseuxPoly):
    if not den:
        raise ZeroDenominator("denominator is zero")
    a = val(v, num)
    return a if a is INF else a - val(v, den)


def initial_part(v: ToricValuation, f: PuiseuxPoly, level: Fraction | None = None) -> PuiseuxPoly:
    """Terms of f whose weight equals level (the minimum weight by default)."""
    if level is None:
        level = val(v, f)
        if level is INF:
            return f
    return f.restrict(lambda k: v.of_exps(k) == level)


def _semigroup_values(gens: list[Fraction], limit: Fraction) -> set[Fraction]:
    """All sums of nonnegative multiples of gens that are <= limit (gens > 0)."""
    seen = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y <= limit and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def value_window(v: ToricValuation, pi: PuiseuxPoly, generators: Sequence[PuiseuxPoly], depth: int) -> list[Fraction]:
    """Sorted values v(m)/p^k - v(pi)/p^j (0 <= j, k <= depth) lying in [-v(pi), 0].

    m runs over products of the generators.  This finite set contains every
    value the mollifier loop can pass through, which bounds its step count.
    """
    vp = val(v, pi)
    if vp is INF or vp <= 0:
        raise NonpositivePi(f"v(pi) must be positive, got {fmt_value(vp)}")
    if depth < 0:
        raise ValidationError("depth must be nonnegative")
    gvals = []
    for g in generators:
        gv = val(v, g)
        if gv is INF:
            continue
        if gv < 0:
            raise ValidationError("generators must have nonnegative value")
        if gv > 0:
            gvals.append(gv)
    p = pi.p
    sums = _semigroup_values(sorted(set(gvals)), vp * p**depth)
    out = set()
    for k in range(depth + 1):
        for j in range(depth + 1):
            shift = vp / p**j
            for s in sums:
                x = s / p**k - shift
                if -vp <= x <= 0:
                    out.add(x)
    return sorted(out)

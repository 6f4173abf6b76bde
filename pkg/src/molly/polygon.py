"""Piecewise-affine lower envelopes of line families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .errors import EmptyFamily, ValidationError, WeightsNonpositive
from .perfring import PuiseuxPoly, fmt_fraction
from .series import FiberSeries, full_section, lambda_decompose
from .valuation import INF, ToricValuation, val

POS_INF = math.inf
NEG_INF = -math.inf


def _exact(x) -> str:
    if x == POS_INF or x is INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    return fmt_fraction(Fraction(x))


def _parse(x):
    """Inverse of num / _exact."""
    if isinstance(x, dict):
        x = x["exact"]
    if x == "inf":
        return POS_INF
    if x == "-inf":
        return NEG_INF
    return Fraction(x)


def num(x) -> dict:
    """Dual encoding: exact string plus a float (null for infinities)."""
    if x == POS_INF or x == NEG_INF or x is INF:
        return {"exact": _exact(x), "float": None}
    return {"exact": _exact(x), "float": float(x)}


@dataclass(frozen=True)
class Line:
    intercept: Fraction
    slope: Fraction

    def __post_init__(self):
        object.__setattr__(self, "intercept", Fraction(self.intercept))
        object.__setattr__(self, "slope", Fraction(self.slope))

    def __call__(self, s):
        return self.intercept + self.slope * s

    def scaled(self, factor: Fraction) -> "Line":
        return Line(self.intercept * factor, self.slope * factor)


@dataclass(frozen=True)
class Piece:
    start: object  # Fraction or -inf
    end: object  # Fraction or +inf
    line: Line
    witness: int = 0


@dataclass(frozen=True)
class Polygon:
    pieces: tuple
    lo: object
    hi: object

    @property
    def slopes(self) -> list[Fraction]:
        return [pc.line.slope for pc in self.pieces]

    @property
    def lines(self) -> list[Line]:
        return [pc.line for pc in self.pieces]

    @property
    def breaks(self) -> list[tuple]:
        """(parameter, value, slope decrease) at every interior piece boundary."""
        out = []
        for a, b in zip(self.pieces, self.pieces[1:]):
            s = a.end
            out.append((s, a.line(s), a.line.slope - b.line.slope))
        return out

    def __call__(self, s):
        if s < self.lo or s > self.hi:
            raise ValidationError(f"parameter {s} outside [{_exact(self.lo)}, {_exact(self.hi)}]")
        for pc in self.pieces:
            if s <= pc.end:
                return pc.line(s)
        return self.pieces[-1].line(s)

    def is_valid(self) -> bool:
        """Finitely many pieces, contiguous and continuous, slopes strictly decreasing."""
        if not self.pieces:
            return False
        if self.pieces[0].start != self.lo or self.pieces[-1].end != self.hi:
            return False
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.end != b.start or a.line(a.end) != b.line(b.start):
                return False
            if not a.line.slope > b.line.slope:
                return False
        return all(pc.start <= pc.end for pc in self.pieces)

    # export
    def to_json(self) -> dict:
        return {
            "interval": [num(self.lo), num(self.hi)],
            "breaks": [{"s": num(s), "value": num(y), "slope_change": num(c)} for s, y, c in self.breaks],
            "pieces": [
                {
                    "start": num(pc.start),
                    "end": num(pc.end),
                    "slope": num(pc.line.slope),
                    "intercept": num(pc.line.intercept),
                    "witness": pc.witness,
                }
                for pc in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polygon":
        pieces = tuple(
            Piece(
                _parse(pc["start"]),
                _parse(pc["end"]),
                Line(_parse(pc["intercept"]), _parse(pc["slope"])),
                pc.get("witness", 0),
            )
            for pc in data["pieces"]
        )
        lo, hi = (_parse(x) for x in data["interval"])
        return cls(pieces, lo, hi)

    def sample_points(self) -> list[Fraction]:
        pts = [pc.start for pc in self.pieces] + [self.pieces[-1].end]
        finite = sorted({Fraction(x) for x in pts if x not in (POS_INF, NEG_INF)})
        if not finite:
            finite = [Fraction(0)]
        span = max(finite[-1] - finite[0], Fraction(1))
        if self.lo == NEG_INF:
            finite.insert(0, finite[0] - span)
        if self.hi == POS_INF:
            finite.append(finite[-1] + span)
        mids = [(a + b) / 2 for a, b in zip(finite, finite[1:])]
        return sorted(set(finite) | set(mids))

    def to_csv(self) -> str:
        rows = ["s_exact,s_float,value_exact,value_float"]
        for s in self.sample_points():
            y = self(s)
            rows.append(f"{_exact(s)},{float(s)!r},{_exact(y)},{float(y)!r}")
        return "\n".join(rows) + "\n"

    def to_svg(self, width: int = 480, height: int = 320, title: str = "") -> str:
        pts = [(s, self(s)) for s in self.sample_points()]
        xs = [float(s) for s, _ in pts]
        ys = [float(y) for _, y in pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        x1 = x1 if x1 > x0 else x0 + 1
        y1 = y1 if y1 > y0 else y0 + 1
        pad = 30

        def tx(x):
            return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

        def ty(y):
            return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

        path = " ".join(f"{'M' if i == 0 else 'L'}{tx(x):.3f},{ty(y):.3f}" for i, (x, y) in enumerate(zip(xs, ys)))
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{escape(title)}</title>" if title else "",
            f'<path d="{path}" fill="none" stroke="black" stroke-width="1.5"/>',
        ]
        for s, y, c in self.breaks:
            fx, fy = tx(float(s)), ty(float(y))
            out.append(f'<circle cx="{fx:.3f}" cy="{fy:.3f}" r="3" fill="red"/>')
            label = f"({_exact(s)}, {_exact(y)}) d={_exact(c)}"
            out.append(f'<text x="{fx + 4:.3f}" y="{fy - 4:.3f}" font-size="10">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(x for x in out if x) + "\n"


def _crossing(l1: Line, l2: Line) -> Fraction:
    return (l2.intercept - l1.intercept) / (l1.slope - l2.slope)


def envelope(lines: Sequence, interval=(NEG_INF, POS_INF)) -> Polygon:
    """Pointwise minimum of lines on a closed interval, as maximal affine pieces.

    Sweep over slopes in decreasing order (the dual of a convex hull). Among
    parallel lines the lower intercept wins, ties going to the earliest index.
    """
    lo, hi = interval
    lo = lo if lo in (NEG_INF, POS_INF) else Fraction(lo)
    hi = hi if hi in (NEG_INF, POS_INF) else Fraction(hi)
    if lo > hi or lo == POS_INF or hi == NEG_INF:
        raise ValidationError("empty interval")
    ls = [ln if isinstance(ln, Line) else Line(*ln) for ln in lines]
    if not ls:
        raise EmptyFamily("envelope of an empty family")
    order = sorted(range(len(ls)), key=lambda i: (-ls[i].slope, ls[i].intercept, i))
    hull: list[int] = []
    for i in order:
        L = ls[i]
        if hull and ls[hull[-1]].slope == L.slope:
            continue
        while len(hull) >= 2 and _crossing(ls[hull[-2]], L) <= _crossing(ls[hull[-2]], ls[hull[-1]]):
            hull.pop()
        hull.append(i)
    bounds = [NEG_INF] + [_crossing(ls[a], ls[b]) for a, b in zip(hull, hull[1:])] + [POS_INF]
    pieces = []
    for j, i in enumerate(hull):
        a, b = max(bounds[j], lo), min(bounds[j + 1], hi)
        if a < b or (a == b and lo == hi and not pieces):
            pieces.append(Piece(a, b, ls[i], i))
    if not pieces:
        # lo == hi landing exactly on a crossing
        for j, i in enumerate(hull):
            if bounds[j] <= lo <= bounds[j + 1]:
                pieces.append(Piece(lo, hi, ls[i], i))
                break
    return Polygon(tuple(pieces), lo, hi)


def min_with_zero(poly: Polygon) -> Polygon:
    return envelope(poly.lines + [Line(0, 0)], (poly.lo, poly.hi))


def scale(poly: Polygon, factor) -> Polygon:
    """Multiply values and slopes by a positive factor (typically p^-k)."""
    factor = Fraction(factor)
    if factor <= 0:
        raise ValidationError("scale factor must be positive")
    return Polygon(
        tuple(Piece(pc.start, pc.end, pc.line.scaled(factor), pc.witness) for pc in poly.pieces),
        poly.lo,
        poly.hi,
    )


def terminal_slope(poly: Polygon) -> Fraction:
    return poly.pieces[-1].line.slope


def complete_valuation_polygon(coeff_vals: Sequence) -> Polygon:
    """a -> min_i {v(a_i) + i a} on the whole line; slope drops at breaks count roots by valuation."""
    lines = [Line(x, i) for i, x in enumerate(coeff_vals) if x is not INF and x is not None]
    if not lines:
        raise EmptyFamily("all coefficient values are infinite")
    return envelope(lines)


def gauss_path_polygon(coeffs: Sequence[PuiseuxPoly], v0: ToricValuation, hi=POS_INF) -> Polygon:
    """r -> min_i {v0(c_i) + i r} for f = sum c_i t^i on [0, hi]."""
    lines = [Line(val(v0, c), i) for i, c in enumerate(coeffs) if c]
    if not lines:
        raise EmptyFamily("zero polynomial")
    return envelope(lines, (0, hi))


def _check_path(U0, direction, lo, hi) -> None:
    for u, w in zip(U0, direction):
        if u + w * lo <= 0:
            raise WeightsNonpositive(f"weight {_exact(u + w * lo)} at the left end")
        if hi == POS_INF:
            if w < 0:
                raise WeightsNonpositive("weights become nonpositive along an unbounded path")
        elif u + w * hi <= 0:
            raise WeightsNonpositive(f"weight {_exact(u + w * hi)} at the right end")


def npinf_polygon(f: FiberSeries, U0: Sequence, direction: Sequence, interval=(0, POS_INF)) -> Polygon:
    """s -> NP-infinity of f at the toric valuation with weights U0 + s*direction."""
    U0 = [Fraction(x) for x in U0]
    direction = [Fraction(x) for x in direction]
    if len(U0) != f.e or len(direction) != f.e:
        raise ValidationError("weight path dimension differs from base variable count")
    lo, hi = interval
    lo = Fraction(lo)
    hi = hi if hi == POS_INF else Fraction(hi)
    _check_path(U0, direction, lo, hi)
    lines = {Line(0, 0)}
    for b in lambda_decompose(f):
        section = full_section(f, b.n)
        for k in section.terms:
            lines.add(Line(sum(a * u for a, u in zip(k, U0)), sum(a * w for a, w in zip(k, direction))))
    ordered = sorted(lines, key=lambda ln: (ln.slope, ln.intercept))
    return envelope(ordered, (lo, hi))

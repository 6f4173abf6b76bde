"""NP and NP-infinity of a fiber series at a toric valuation, symbols and weak admissibility."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonNegativeNP
from .perfring import PuiseuxPoly
from .series import FiberSeries, full_section, lambda_decompose
from .valuation import INF, ToricValuation, initial_part, val


def np(h: FiberSeries, v: ToricValuation) -> Fraction:
    """min{0, v(a_k/pi)} over nonzero indices k; the constant term does not count."""
    best = Fraction(0)
    vpi = val(v, h.pi)
    for k, a in h.coeffs.items():
        if any(k):
            x = val(v, a) - vpi
            if x < best:
                best = x
    return best


def branch_values(h: FiberSeries, v: ToricValuation) -> dict:
    """Value of the full-depth Frobenius section of every branch."""
    return {b.n: val(v, full_section(h, b.n)) for b in lambda_decompose(h)}


def npinf(h: FiberSeries, v: ToricValuation) -> Fraction:
    best = Fraction(0)
    for x in branch_values(h, v).values():
        if x is not INF and x < best:
            best = x
    return best


@dataclass(frozen=True)
class SymbolPart:
    level: Fraction
    terms: dict  # fiber index -> weight-level part of a_k/pi
    p: int

    def support(self) -> list:
        return sorted(self.terms, key=lambda k: (sum(k), k))


def symbol(h: FiberSeries, v: ToricValuation) -> SymbolPart:
    lam = np(h, v)
    if lam >= 0:
        raise NonNegativeNP("symbol is only defined when NP < 0")
    terms = {}
    for k in h.nonconstant_indices():
        a = h.value_coeff(k)
        if val(v, a) == lam:
            terms[k] = initial_part(v, a, lam)
    return SymbolPart(lam, terms, h.p)


def is_separable_symbol(sym: SymbolPart) -> bool:
    return any(any(x % sym.p for x in k) for k in sym.terms)


def is_weakly_admissible(h: FiberSeries, v: ToricValuation) -> bool:
    return np(h, v) == npinf(h, v)


def leading_part(h: FiberSeries, v: ToricValuation, level: Fraction) -> dict[tuple, PuiseuxPoly]:
    """Weight-level part of every nonconstant a_k/pi (empty entries omitted)."""
    out = {}
    for k in h.nonconstant_indices():
        part = initial_part(v, h.value_coeff(k), level)
        if part:
            out[k] = part
    return out

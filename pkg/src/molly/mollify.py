"""Artin-Schreier mollifiers: the reduction step, the minimal loop, the explicit monomial formula
and the coordinate-divisor chain."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from . import np as npm
from .errors import (
    AlreadyOptimal,
    DivisorObstruction,
    NotPDivisible,
    PiNotMonomial,
    ValidationError,
    WeightsDependent,
)
from .perfring import PuiseuxPoly, fmt_fraction
from .series import FiberSeries, as_twist, index_key
from .valuation import ToricValuation

MAX_LOOP = 100_000


class Case(str, Enum):
    ALREADY_ADMISSIBLE = "AlreadyAdmissible"
    MOLLIFIED = "Mollified"
    NEGATIVE_CERTIFICATE = "NegativeCertificate"


@dataclass(frozen=True)
class NegativeCertificate:
    """Witness that NP-infinity is at most bound < 0.

    n0 is the base exponent whose folded coefficient depends on x, k0 = p^K l0 the
    fiber index carrying it, m the power with p^{m+1} not dividing k0.
    """

    n0: tuple
    k0: tuple
    K: int
    m: int
    l0: tuple
    bound: Fraction

    def to_json(self) -> dict:
        return {
            "n0": [int(x) for x in self.n0],
            "k0": list(self.k0),
            "K": self.K,
            "m": self.m,
            "l0": list(self.l0),
            "bound": fmt_fraction(self.bound),
        }


@dataclass(frozen=True)
class MollifierReport:
    g: FiberSeries
    trace: tuple
    initial_np: Fraction
    final_np: Fraction
    npinf: Fraction
    case: Case
    series: FiberSeries | None = None  # h + (g^p - g)

    @property
    def steps(self) -> int:
        return len(self.trace)

    def to_json(self) -> dict:
        out = {
            "case": self.case.value,
            "g": self.g.to_json(),
            "trace": [fmt_fraction(x) for x in self.trace],
            "initial_np": fmt_fraction(self.initial_np),
            "final_np": fmt_fraction(self.final_np),
            "npinf": fmt_fraction(self.npinf),
        }
        if self.series is not None:
            out["twisted"] = self.series.to_json()
        return out


def _zero_like(h: FiberSeries, bound: int | None = None) -> FiberSeries:
    return FiberSeries(h.p, h.e, h.d, h.bound if bound is None else bound)


def _root_leading(h: FiberSeries, v: ToricValuation, lam: Fraction) -> FiberSeries:
    p = h.p
    coeffs = {}
    for k, part in npm.leading_part(h, v, lam).items():
        if any(x % p for x in k):
            raise NotPDivisible(f"leading index {k} is not divisible by p")
        coeffs[tuple(x // p for x in k)] = (-part).p_root()
    return FiberSeries(p, h.e, h.d, h.bound, coeffs)


def reduce_step(h: FiberSeries, v: ToricValuation) -> FiberSeries:
    """g = (-h_lambda)^{1/p} with fiber indices divided by p, where h_lambda is the part of
    h of weight exactly NP(h)(v).  Twisting by g cancels that part."""
    lam = npm.np(h, v)
    if lam == npm.npinf(h, v):
        raise AlreadyOptimal("NP already equals NP-infinity")
    return _root_leading(h, v, lam)


def mollify_minimal(h: FiberSeries, v: ToricValuation) -> MollifierReport:
    initial = npm.np(h, v)
    target = npm.npinf(h, v)
    if initial == target:
        return MollifierReport(_zero_like(h), (), initial, initial, target, Case.ALREADY_ADMISSIBLE, h)
    g_total = _zero_like(h)
    cur, lam = h, initial
    trace = []
    while lam < target:
        if len(trace) >= MAX_LOOP:
            raise RuntimeError("mollifier loop failed to terminate")
        g = _root_leading(cur, v, lam)
        cur = as_twist(cur, g, strict=True)
        g_total = g_total + g
        new = npm.np(cur, v)
        if new <= lam:
            raise RuntimeError("reduction step did not raise NP")
        lam = new
        trace.append(lam)
    return MollifierReport(g_total, tuple(trace), initial, lam, target, Case.MOLLIFIED, cur)


def apply_mollifier(h: FiberSeries, g: FiberSeries) -> FiberSeries:
    """h + (g^p - g) over a box wide enough for g^p."""
    bound = max(h.bound, g.bound, h.p * g.max_degree())
    return as_twist(h.with_bound(bound), g, strict=True)


# --- explicit formula for monomial valuations ---

def _vp(n: int, p: int) -> int:
    k = 0
    while n and n % p == 0:
        n //= p
        k += 1
    return k


def _chain_top(n: tuple, lower: tuple, p: int) -> tuple[tuple, int]:
    """Largest p^j n still >= lower coordinatewise; n has a negative coordinate."""
    j = 0
    while True:
        nxt = tuple(x * p for x in n)
        if any(a < b for a, b in zip(nxt, lower)):
            return n, j
        n, j = nxt, j + 1


def _divisibility(t: tuple, p: int) -> int:
    """max{i : t / p^i integral}."""
    return min(_vp(x, p) if x else 10**9 for x in t) if any(t) else 0


@dataclass
class _PolarData:
    tops: dict = field(default_factory=dict)  # top -> list of polar exponents in its chain
    b: dict = field(default_factory=dict)  # exponent n -> {fiber index: coeff}


def _polar_expansion(f: FiberSeries, v: ToricValuation) -> tuple[_PolarData, tuple]:
    p = f.p
    alpha = f.pi.leading()[0]
    if any(x < 0 for x in alpha):
        raise PiNotMonomial("pi must be a monomial with nonnegative exponents")
    lower = [-int(a) for a in alpha]
    data = _PolarData()
    for k, a in f.coeffs.items():
        if not a.is_integral():
            raise ValidationError("the explicit formula needs integer exponents in the numerators")
        for exps, c in a.divide_monomial(f.pi).terms.items():
            n = tuple(int(x) for x in exps)
            lower = [min(lo, x) for lo, x in zip(lower, n)]
            if v.of_exps(n) < 0:
                data.b.setdefault(n, {})[k] = c
    lower = tuple(lower)
    for n in data.b:
        top, _ = _chain_top(n, lower, p)
        data.tops.setdefault(top, []).append(n)
    return data, lower


def _check_generic(data: _PolarData, v: ToricValuation, p: int) -> None:
    seen = {}
    for top in data.tops:
        d = _divisibility(top, p)
        for i in range(d + 1):
            n = tuple(x // p**i for x in top)
            w = v.of_exps(n)
            if w in seen and seen[w] != n:
                raise WeightsDependent(
                    f"exponents {seen[w]} and {n} share the value {fmt_fraction(w)}; weights are not generic here"
                )
            seen[w] = n


def folded_coefficients(data: _PolarData, p: int) -> dict:
    """c_t = sum_i b_{t/p^i}^{p^i} for every chain top t, as {fiber index: coeff}."""
    out = {}
    for top in data.tops:
        c: dict = {}
        for i in range(_divisibility(top, p) + 1):
            n = tuple(x // p**i for x in top)
            for k, coef in data.b.get(n, {}).items():
                kk = tuple(x * p**i for x in k)
                c[kk] = (c.get(kk, 0) + coef) % p
        out[top] = {k: x for k, x in c.items() if x}
    return out


def _certificate(folded: dict, v: ToricValuation, p: int) -> NegativeCertificate | None:
    best = None
    for top in sorted(folded, key=index_key):
        for k in sorted(folded[top], key=index_key):
            if not any(k):
                continue
            K = min(_vp(x, p) if x else 10**9 for x in k)
            bound = v.of_exps(top) / p**K
            cand = (bound, index_key(top), index_key(k))
            if best is None or cand < best[0]:
                l0 = tuple(x // p**K for x in k)
                best = (cand, NegativeCertificate(top, k, K, K, l0, bound))
    return None if best is None else best[1]


def _formula_mollifier(f: FiberSeries, data: _PolarData) -> FiberSeries:
    p, e = f.p, f.e
    acc: dict = {}

    def add(k, poly):
        acc[k] = acc[k] + poly if k in acc else poly

    for top in data.tops:
        d = _divisibility(top, p)
        for i in range(1, d + 1):
            # (sum_{k=i}^{d} b_{t/p^k} s^{t/p^k})^{p^{i-1}}
            for kk in range(i, d + 1):
                n = tuple(x // p**kk for x in top)
                mono = PuiseuxPoly(p, e, {n: 1})
                for idx, c in data.b.get(n, {}).items():
                    term = (mono * c).frobenius_iter(i - 1)
                    add(tuple(x * p ** (i - 1) for x in idx), term)
    deg = max((max(k) for k in acc), default=0)
    bound = max(f.bound, p * deg)
    return FiberSeries(p, e, f.d, bound, acc)


def mollify_monomial(f: FiberSeries, v: ToricValuation) -> MollifierReport | NegativeCertificate:
    """Closed-form mollifier at a monomial valuation with generic weights.

    Either every folded coefficient c_t is free of x, and twisting by the returned
    g leaves only x-free polar terms (NP becomes 0), or a certificate bounding
    NP-infinity away from 0 is returned.
    """
    if f.e != v.e:
        raise ValidationError("valuation and series have different base dimensions")
    p = f.p
    data, _ = _polar_expansion(f, v)
    _check_generic(data, v, p)
    initial = npm.np(f, v)
    if initial == 0:
        return MollifierReport(_zero_like(f), (), initial, initial, Fraction(0), Case.ALREADY_ADMISSIBLE, f)
    folded = folded_coefficients(data, p)
    cert = _certificate(folded, v, p)
    if cert is not None:
        return cert
    g = _formula_mollifier(f, data)
    twisted = apply_mollifier(f, g)
    final = npm.np(twisted, v)
    target = npm.npinf(f, v)
    return MollifierReport(g, (final,), initial, final, target, Case.MOLLIFIED, twisted)


# --- coordinate-divisor chain ---

@dataclass(frozen=True)
class ChainStep:
    coordinate: int
    weights: tuple
    initial_np: Fraction
    final_np: Fraction
    constant: PuiseuxPoly  # x-free polar part removed after the twist


@dataclass(frozen=True)
class ChainReport:
    g: FiberSeries
    steps: tuple
    series: FiberSeries  # f/pi + (g^p - g) + constants
    case: Case

    def regular(self) -> bool:
        """Every nonconstant coefficient of the result has nonnegative exponents."""
        for k in self.series.nonconstant_indices():
            for exps in self.series.value_coeff(k).terms:
                if any(x < 0 for x in exps):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "g": self.g.to_json(),
            "steps": [
                {
                    "coordinate": s.coordinate,
                    "weights": [fmt_fraction(w) for w in s.weights],
                    "initial_np": fmt_fraction(s.initial_np),
                    "final_np": fmt_fraction(s.final_np),
                    "constant": s.constant.to_json(),
                }
                for s in self.steps
            ],
            "result": self.series.to_json(),
            "regular": self.regular(),
        }


def divisor_weights(f: FiberSeries, coordinate: int) -> ToricValuation:
    """Weight 1 on the coordinate, eps, eps^2, ... on the others, eps small enough that the sign
    of any relevant exponent's value is decided by the chosen coordinate and values stay distinct."""
    alpha = f.pi.leading()[0]
    B = max([1] + [int(abs(a)) for a in alpha])
    for a in f.coeffs.values():
        for exps in a.terms:
            B = max([B] + [abs(int(x)) for x in exps])
    big = B * (B + max(int(x) for x in alpha) + 1)
    eps = Fraction(1, 8 * big + 8)
    weights, r = [], 1
    for j in range(f.e):
        if j == coordinate:
            weights.append(Fraction(1))
        else:
            weights.append(eps**r)
            r += 1
    return ToricValuation(weights)


def divisor_chain_mollify(f: FiberSeries, order: Sequence[int] | None = None) -> ChainReport:
    """Mollify along the coordinate divisors of pi, last coordinate first, dropping the x-free
    polar constant after each step."""
    alpha = f.pi.leading()[0]
    if any(x < 0 or x.denominator != 1 for x in alpha):
        raise PiNotMonomial("pi must be a monomial with nonnegative integer exponents")
    support = [j for j, a in enumerate(alpha) if a > 0]
    if order is None:
        order = support
    order = list(order)
    if sorted(order) != sorted(support):
        raise ValidationError(f"order {order} must list exactly the coordinates {support} dividing pi")
    vals = {j: divisor_weights(f, j) for j in order}
    for j in order:
        if npm.npinf(f, vals[j]) < 0:
            cert = mollify_monomial(f, vals[j])
            if not isinstance(cert, NegativeCertificate):
                raise RuntimeError("negative NP-infinity without a certificate")
            raise DivisorObstruction(j, cert)
    cur = f
    g_total = _zero_like(f)
    steps = []
    for j in reversed(order):
        w = vals[j]
        before = npm.np(cur, w)
        rep = mollify_monomial(cur, w)
        if isinstance(rep, NegativeCertificate):
            raise DivisorObstruction(j, rep)
        cur = rep.series
        g_total = g_total + rep.g
        zero = (0,) * cur.d
        const = cur.coeff(zero).divide_monomial(cur.pi)
        polar = const.restrict(lambda k: w.of_exps(k) < 0)
        if polar:
            cur = FiberSeries(
                cur.p, cur.e, cur.d, cur.bound, {**cur.coeffs, zero: cur.coeff(zero) - polar * cur.pi}, cur.pi
            )
        steps.append(ChainStep(j, w.weights, before, npm.np(cur, w), -polar))
    case = Case.MOLLIFIED if any(s.initial_np < 0 for s in steps) else Case.ALREADY_ADMISSIBLE
    return ChainReport(g_total, tuple(steps), cur, case)

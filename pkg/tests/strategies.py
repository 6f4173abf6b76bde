"""Hypothesis strategies for the algebraic types."""

from fractions import Fraction

from hypothesis import strategies as st

from molly.perfring import PuiseuxPoly
from molly.series import FiberSeries
from molly.valuation import ToricValuation

primes = st.sampled_from([2, 3, 5])


@st.composite
def exponents(draw, p, lo=-3, hi=4, depth=2):
    q = p ** draw(st.integers(0, depth))
    return Fraction(draw(st.integers(lo * q, hi * q)), q)


@st.composite
def puiseux(draw, p, e, max_terms=4, lo=-3, hi=4, depth=2, nonzero=False):
    n = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(n):
        k = tuple(draw(exponents(p, lo, hi, depth)) for _ in range(e))
        terms[k] = draw(st.integers(1, p - 1))
    return PuiseuxPoly(p, e, terms)


@st.composite
def monomials(draw, p, e, lo=-3, hi=4, depth=2):
    k = [draw(exponents(p, lo, hi, depth)) for _ in range(e)]
    return PuiseuxPoly.monomial(p, k, draw(st.integers(1, p - 1)))


@st.composite
def weights(draw, e):
    return ToricValuation(
        [Fraction(draw(st.integers(1, 12)), draw(st.integers(1, 5))) for _ in range(e)]
    )


@st.composite
def series(draw, p=None, e=None, d=None, bound=None, max_terms=5):
    p = draw(primes) if p is None else p
    e = draw(st.integers(1, 3)) if e is None else e
    d = draw(st.integers(1, 2)) if d is None else d
    bound = draw(st.integers(p, 18)) if bound is None else bound
    coeffs = {}
    for _ in range(draw(st.integers(0, max_terms))):
        k = tuple(draw(st.integers(0, bound)) for _ in range(d))
        coeffs[k] = draw(puiseux(p, e, 3, lo=-2, hi=3, depth=1, nonzero=True))
    pi_exps = [draw(st.integers(0, 2)) for _ in range(e)]
    return FiberSeries(p, e, d, bound, coeffs, PuiseuxPoly.monomial(p, pi_exps))


@st.composite
def series_and_weights(draw, **kw):
    h = draw(series(**kw))
    return h, draw(weights(h.e))

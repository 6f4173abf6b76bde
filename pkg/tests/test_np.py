from fractions import Fraction

import pytest
from hypothesis import given

from molly import np as npm
from molly.errors import NonNegativeNP
from molly.perfring import PuiseuxPoly
from molly.series import FiberSeries, as_twist
from molly.valuation import ToricValuation, val
from strategies import series_and_weights


def intro():
    s, t = PuiseuxPoly.var(3, 2, 0), PuiseuxPoly.var(3, 2, 1)
    h = FiberSeries(3, 2, 1, 9, {(3,): PuiseuxPoly.const(3, 2), (1,): t}, s)
    return h, ToricValuation([9, 3]), s, t


def test_intro_np_and_npinf():
    h, v, s, t = intro()
    # independent oracle: coefficient values minus v(pi)
    vals = [val(v, PuiseuxPoly.const(3, 2)) - 9, val(v, t) - 9]
    assert npm.np(h, v) == min(0, *vals) == -9
    # section t/s + s^(-1/3): min(3 - 9, -9/3)
    assert npm.npinf(h, v) == min(Fraction(-6), Fraction(-9, 3)) == -6
    assert not npm.is_weakly_admissible(h, v)


def test_regular_series_has_zero_np():
    s = PuiseuxPoly.var(2, 1, 0)
    h = FiberSeries(2, 1, 1, 4, {(1,): s, (3,): s * s})
    v = ToricValuation([1])
    assert npm.np(h, v) == 0 == npm.npinf(h, v)


def test_geometric_over_s():
    a = Fraction(5, 2)
    one = PuiseuxPoly.const(3, 1)
    s = PuiseuxPoly.var(3, 1, 0)
    h = FiberSeries(3, 1, 1, 8, {(k,): one for k in range(9)}, s)
    assert npm.np(h, ToricValuation([a])) == -a


def test_single_branch_p2():
    s = PuiseuxPoly.var(2, 1, 0)
    h = FiberSeries(2, 1, 1, 2, {(2,): PuiseuxPoly.const(2, 1)}, s)
    v = ToricValuation([1])
    assert npm.np(h, v) == -1
    assert npm.npinf(h, v) == Fraction(-1, 2)


def test_constant_term_ignored():
    s = PuiseuxPoly.var(2, 1, 0)
    h = FiberSeries(2, 1, 1, 2, {(0,): s**-5}, s)
    assert npm.np(h, ToricValuation([1])) == 0 == npm.npinf(h, ToricValuation([1]))


def test_symbol_of_intro():
    h, v, s, _ = intro()
    sym = npm.symbol(h, v)
    assert sym.level == -9 and list(sym.terms) == [(3,)]
    assert sym.terms[(3,)] == s**-1
    assert not npm.is_separable_symbol(sym)


def test_separability_examples():
    s = PuiseuxPoly.var(3, 1, 0)
    for k, sep in [((1,), True), ((3,), False)]:
        h = FiberSeries(3, 1, 1, 9, {k: PuiseuxPoly.const(3, 1)}, s)
        assert npm.is_separable_symbol(npm.symbol(h, ToricValuation([1]))) is sep


def test_symbol_needs_negative_np():
    s = PuiseuxPoly.var(3, 1, 0)
    with pytest.raises(NonNegativeNP):
        npm.symbol(FiberSeries(3, 1, 1, 3, {(1,): s}), ToricValuation([1]))


def test_leading_part_weight_level():
    h, v, s, t = intro()
    lp = npm.leading_part(h, v, Fraction(-6))
    assert lp == {(1,): t * s**-1}


@given(series_and_weights())
def test_order_inequality(hv):
    h, v = hv
    assert npm.np(h, v) <= npm.npinf(h, v) <= 0


@given(series_and_weights())
def test_unit_monomial_invariance(hv):
    h, v = hv
    # u = s_0^{w1} s_1^{-w0} style monomial of value 0 (single coordinate case: nothing but 1)
    if h.e == 1:
        u = PuiseuxPoly.const(h.p, 1)
    else:
        w0, w1 = v.weights[0], v.weights[1]
        exps = [w1.numerator * w0.denominator, -w0.numerator * w1.denominator] + [0] * (h.e - 2)
        u = PuiseuxPoly.monomial(h.p, exps)
    assert val(v, u) == 0
    hu = h.map_coeffs(lambda a: a * u)
    assert npm.np(hu, v) == npm.np(h, v)
    assert npm.npinf(hu, v) == npm.npinf(h, v)


@given(series_and_weights())
def test_separability_iff_weak_admissibility(hv):
    h, v = hv
    if npm.npinf(h, v) < 0:
        assert npm.is_separable_symbol(npm.symbol(h, v)) == npm.is_weakly_admissible(h, v)


@given(series_and_weights())
def test_twist_of_reduced_part_keeps_npinf(hv):
    h, v = hv
    g = FiberSeries(h.p, h.e, h.d, h.bound, {k: a for k, a in h.coeffs.items() if h.in_box(tuple(x * h.p for x in k))}, h.pi)
    assert npm.npinf(as_twist(h, g, strict=True), v) == npm.npinf(h, v)

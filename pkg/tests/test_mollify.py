import math
from fractions import Fraction

import pytest
from hypothesis import given

from molly import np as npm
from molly.corpus import intro_instance, monomial_instances, negative_instances
from molly.errors import AlreadyOptimal, DivisorObstruction, PiNotMonomial, ValidationError, WeightsDependent
from molly.mollify import (
    Case,
    NegativeCertificate,
    apply_mollifier,
    divisor_chain_mollify,
    mollify_minimal,
    mollify_monomial,
    reduce_step,
)
from molly.perfring import PuiseuxPoly
from molly.series import FiberSeries, as_twist
from molly.valuation import ToricValuation, value_window
from strategies import series_and_weights


def mono(p, *exps):
    return PuiseuxPoly.monomial(p, [Fraction(x) for x in exps])


def test_reduce_step_intro():
    h, v = intro_instance(3, 9, 3)
    g = reduce_step(h, v)
    assert g.coeffs == {(1,): -mono(3, Fraction(-1, 3), 0)}
    out = as_twist(h, g)
    t = PuiseuxPoly.var(3, 2, 1)
    assert out.coeffs == {(1,): t + mono(3, Fraction(2, 3), 0)}
    assert npm.np(out, v) == -6


def test_reduce_step_p_squared_descent():
    s = PuiseuxPoly.var(2, 1, 0)
    h = FiberSeries(2, 1, 1, 4, {(4,): PuiseuxPoly.const(2, 1)}, s)
    v = ToricValuation([1])
    g = reduce_step(h, v)
    assert g.coeffs == {(2,): -mono(2, Fraction(-1, 2))}
    assert npm.np(as_twist(h, g), v) == Fraction(-1, 2)


def test_reduce_step_monomial_symbol_gives_monomial_g():
    s = PuiseuxPoly.var(5, 1, 0)
    h = FiberSeries(5, 1, 1, 10, {(5,): s * 3}, s**4)
    g = reduce_step(h, ToricValuation([2]))
    assert len(g.coeffs) == 1 and all(a.is_monomial() for a in g.coeffs.values())


def test_reduce_step_refuses_optimal():
    s = PuiseuxPoly.var(3, 1, 0)
    h = FiberSeries(3, 1, 1, 3, {(1,): PuiseuxPoly.const(3, 1)}, s)
    with pytest.raises(AlreadyOptimal):
        reduce_step(h, ToricValuation([1]))


def test_mollify_minimal_intro():
    h, v = intro_instance(3, 9, 3)
    rep = mollify_minimal(h, v)
    assert rep.case == Case.MOLLIFIED and rep.trace == (-6,)
    assert rep.final_np == rep.npinf == -6
    assert rep.g.coeffs == {(1,): -mono(3, Fraction(-1, 3), 0)}


def test_mollify_minimal_already_admissible():
    s = PuiseuxPoly.var(3, 1, 0)
    h = FiberSeries(3, 1, 1, 3, {(1,): PuiseuxPoly.const(3, 1)}, s)
    rep = mollify_minimal(h, ToricValuation([1]))
    assert rep.case == Case.ALREADY_ADMISSIBLE and rep.trace == () and not rep.g.coeffs


def test_mollify_minimal_two_steps():
    s = PuiseuxPoly.var(2, 1, 0)
    h = FiberSeries(2, 1, 1, 4, {(4,): PuiseuxPoly.const(2, 1)}, s)
    rep = mollify_minimal(h, ToricValuation([1]))
    assert rep.initial_np == -1
    assert rep.trace == (Fraction(-1, 2), Fraction(-1, 4))
    assert rep.final_np == rep.npinf == Fraction(-1, 4)


def test_report_json():
    h, v = intro_instance(3, 9, 3)
    data = mollify_minimal(h, v).to_json()
    assert data["final_np"] == "-6" and data["trace"] == ["-6"] and data["case"] == "Mollified"


def test_monomial_formula_trivial():
    s = PuiseuxPoly.var(3, 1, 0)
    f = FiberSeries(3, 1, 1, 3, {(1,): s * s}, s)
    rep = mollify_monomial(f, ToricValuation([1]))
    assert rep.case == Case.ALREADY_ADMISSIBLE and rep.final_np == 0 and not rep.g.coeffs


def test_monomial_formula_x_free_polar_constant():
    p = 3
    s, u = PuiseuxPoly.var(p, 2, 0), PuiseuxPoly.var(p, 2, 1)
    # f/pi = u * s^-2 + x * u, with pi = s
    f = FiberSeries(p, 2, 1, 3, {(0,): u * s**-1, (1,): u * s}, s)
    v = ToricValuation([1, Fraction(7, 5)])
    rep = mollify_monomial(f, v)
    assert not isinstance(rep, NegativeCertificate)
    assert rep.final_np == 0 and not rep.g.coeffs


def test_monomial_formula_certificate():
    p = 3
    s = PuiseuxPoly.var(p, 1, 0)
    f = FiberSeries(p, 1, 1, 9, {(3,): PuiseuxPoly.const(p, 1)}, s)
    v = ToricValuation([1])
    cert = mollify_monomial(f, v)
    # oracle from the np module
    inf = npm.npinf(f, v)
    assert inf == Fraction(-1, 3)
    assert isinstance(cert, NegativeCertificate)
    assert (cert.n0, cert.k0, cert.K, cert.l0) == ((-1,), (3,), 1, (1,))
    assert cert.bound == Fraction(-1, 3)
    assert inf <= cert.bound < 0
    assert all(x % p ** (cert.m + 1) for x in cert.k0 if x)


def test_monomial_formula_intro_certificate():
    h, v = intro_instance(3, 9, 3)
    cert = mollify_monomial(h, v)
    assert isinstance(cert, NegativeCertificate)
    assert npm.npinf(h, v) <= cert.bound < 0


def test_monomial_formula_mollifies_polar_twist():
    p = 2
    s = PuiseuxPoly.var(p, 1, 0)
    # f/pi = x + (g^2 - g) with g = x s^-3
    h = as_twist(FiberSeries(p, 1, 1, 4, {(1,): PuiseuxPoly.const(p, 1)}), FiberSeries(p, 1, 1, 4, {(1,): s**-3}))
    f = FiberSeries(p, 1, 1, 4, {k: a * s**6 for k, a in h.coeffs.items()}, s**6)
    v = ToricValuation([1])
    rep = mollify_monomial(f, v)
    assert rep.case == Case.MOLLIFIED and rep.final_np == 0 == rep.npinf
    assert npm.np(apply_mollifier(f, rep.g), v) == 0


def test_monomial_formula_rejects():
    s = PuiseuxPoly.var(3, 2, 0)
    t = PuiseuxPoly.var(3, 2, 1)
    # polar exponents s^-1 and t^-1 share the value -1 at weights (1, 1)
    f = FiberSeries(3, 2, 1, 3, {(1,): t, (2,): s}, s * t)
    with pytest.raises(WeightsDependent):
        mollify_monomial(f, ToricValuation([1, 1]))
    g = FiberSeries(3, 2, 1, 3, {(1,): PuiseuxPoly.const(3, 2)}, s**-1 * t)
    with pytest.raises(PiNotMonomial):
        mollify_monomial(g, ToricValuation([1, 2]))
    with pytest.raises(ValidationError):
        mollify_monomial(f, ToricValuation([1]))


def test_divisor_chain_regular():
    p = 3
    s, t = PuiseuxPoly.var(p, 2, 0), PuiseuxPoly.var(p, 2, 1)
    base = FiberSeries(p, 2, 1, 9, {(1,): t})
    h = as_twist(base, FiberSeries(p, 2, 1, 9, {(1,): s**-1 * t**-1}))
    pi = s**3 * t**3
    f = FiberSeries(p, 2, 1, 9, {k: a * pi for k, a in h.coeffs.items()}, pi)
    rep = divisor_chain_mollify(f)
    assert rep.regular()
    assert [st.coordinate for st in rep.steps] == [1, 0]
    assert all(st.final_np == 0 for st in rep.steps)


def test_divisor_chain_obstruction():
    s = PuiseuxPoly.var(2, 1, 0)
    f = FiberSeries(2, 1, 1, 4, {(2,): PuiseuxPoly.const(2, 1)}, s)
    with pytest.raises(DivisorObstruction) as info:
        divisor_chain_mollify(f)
    assert info.value.index == 0
    assert info.value.certificate.bound == Fraction(-1, 2)


def test_divisor_chain_order_validated():
    s = PuiseuxPoly.var(2, 2, 0)
    f = FiberSeries(2, 2, 1, 4, {(1,): s}, s)
    with pytest.raises(ValidationError):
        divisor_chain_mollify(f, [1])


@given(series_and_weights())
def test_reduce_step_raises_np(hv):
    h, v = hv
    if npm.np(h, v) < npm.npinf(h, v):
        g = reduce_step(h, v)
        assert npm.np(as_twist(h, g, strict=True), v) > npm.np(h, v)


@given(series_and_weights())
def test_mollify_minimal_contract(hv):
    h, v = hv
    rep = mollify_minimal(h, v)
    tr = list(rep.trace)
    assert all(a < b for a, b in zip(tr, tr[1:]))
    assert rep.final_np == npm.npinf(h, v)
    assert npm.np(as_twist(h, rep.g), v) == rep.final_np
    assert mollify_minimal(as_twist(h, rep.g), v).case == Case.ALREADY_ADMISSIBLE


def test_loop_bound_by_value_window():
    for h, v in negative_instances(11, 60, integral=True):
        rep = mollify_minimal(h, v)
        depth = max(1, math.ceil(math.log(h.bound, h.p)))
        gens = [PuiseuxPoly.var(h.p, h.e, i) for i in range(h.e)]
        window = value_window(v, h.pi, gens, depth)
        assert set(rep.trace) <= set(window)
        assert rep.steps <= len(window)


def test_monomial_agrees_with_minimal():
    for f, v in monomial_instances(5, 40):
        rep = mollify_monomial(f, v)
        inf = npm.npinf(f, v)
        if isinstance(rep, NegativeCertificate):
            assert inf <= rep.bound < 0
        else:
            assert inf == 0 and rep.final_np == 0
            assert mollify_minimal(f, v).final_np == 0

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from molly.errors import BoundOverflow, DimensionMismatch, ValidationError
from molly.perfring import PuiseuxPoly
from molly.series import (
    FiberSeries,
    as_twist,
    branch_length,
    frobenius_section,
    geometric_as_branch,
    hadamard,
    lambda_decompose,
)
from strategies import series


def intro(p=3):
    s, t = PuiseuxPoly.var(p, 2, 0), PuiseuxPoly.var(p, 2, 1)
    one = PuiseuxPoly.const(p, 2)
    return FiberSeries(p, 2, 1, p * p, {(p,): one, (1,): t}, s), s, t


def test_single_term_branch():
    a = PuiseuxPoly.var(3, 1, 0)
    [b] = lambda_decompose(FiberSeries(3, 1, 1, 5, {(1,): a}))
    assert b.n == (1,) and b.entries[0] == a


def test_geometric_branch_p2():
    one = PuiseuxPoly.const(2, 0)
    f = FiberSeries(2, 0, 1, 4, {(1,): one, (2,): one, (4,): one})
    [b] = lambda_decompose(f)
    assert b.n == (1,) and list(b.entries) == [one, one, one]


def test_two_variable_reduction():
    one = PuiseuxPoly.const(2, 1)
    c = PuiseuxPoly.var(2, 1, 0)
    f = FiberSeries(2, 1, 2, 4, {(2, 1): one, (4, 2): c})
    [b] = lambda_decompose(f)
    assert (4 // 2, 2 // 2) == (2, 1)
    assert b.n == (2, 1) and list(b.entries) == [one, c]


def test_frobenius_sections_of_intro():
    h, s, t = intro()
    assert frobenius_section(h, (1,), 0) == t * s**-1
    assert frobenius_section(h, (1,), 1) == t * s**-1 + PuiseuxPoly.monomial(3, [Fraction(-1, 3), 0])


def test_single_entry_branch_section():
    h, s, t = intro()
    g = FiberSeries(3, 2, 1, 9, {(2,): t}, s)
    for m in range(4):
        assert frobenius_section(g, (2,), m) == t * s**-1


def test_section_rejects_non_lambda():
    h, _, _ = intro()
    with pytest.raises(ValidationError):
        frobenius_section(h, (3,), 0)


def test_intro_twist():
    h, s, t = intro()
    g = FiberSeries(3, 2, 1, 9, {(1,): -PuiseuxPoly.monomial(3, [Fraction(-1, 3), 0])})
    out = as_twist(h, g)
    want = FiberSeries(3, 2, 1, 9, {(1,): t + PuiseuxPoly.monomial(3, [Fraction(2, 3), 0])}, s)
    assert out == want


def test_trivial_twists():
    h, _, _ = intro()
    assert as_twist(h, FiberSeries(3, 2, 1, 9)) == h
    for c in range(3):
        const = FiberSeries(3, 2, 1, 9, {(0,): PuiseuxPoly.const(3, 2, c)})
        assert as_twist(h, const) == h


def test_strict_twist_overflow():
    h, s, t = intro()
    g = FiberSeries(3, 2, 1, 9, {(4,): t})
    assert as_twist(h, g).coeff((4,)) == -(t * s)
    with pytest.raises(BoundOverflow):
        as_twist(h, g, strict=True)


def test_hadamard_examples():
    h, _, _ = intro()
    ones = FiberSeries(3, 2, 1, 9, {(k,): PuiseuxPoly.const(3, 2) for k in range(10)})
    assert hadamard(h, ones) == h
    with pytest.raises(DimensionMismatch):
        hadamard(h, FiberSeries(3, 2, 1, 8))


def test_geometric_series_is_artin_schreier():
    for p, n, D in [(2, (1,), 32), (3, (2,), 30), (2, (1, 3), 16)]:
        g = geometric_as_branch(n, D, p)
        # g - g^p = x^n up to indices beyond D
        minus = as_twist(FiberSeries(p, 0, len(n), D), g)  # g^p - g
        assert (-minus).coeffs == {n: PuiseuxPoly.const(p, 0)}


def test_json_round_trip():
    h, _, _ = intro()
    assert FiberSeries.from_json(h.to_json(), 3, 2, 1, 9) == h


@given(series())
def test_lambda_decompose_partitions(f):
    branches = lambda_decompose(f)
    covered = []
    for b in branches:
        assert any(x % f.p for x in b.n)
        assert len(b) == branch_length(b.n, f.p, f.bound)
        for k, a in enumerate(b.entries):
            if a:
                covered.append(tuple(x * f.p**k for x in b.n))
    assert sorted(covered) == sorted(f.nonconstant_indices())


@given(series())
def test_section_stabilizes_at_log_depth(f):
    for b in lambda_decompose(f):
        depth = 0
        while max(b.n) * f.p ** (depth + 1) <= f.bound:
            depth += 1
        full = frobenius_section(f, b.n, depth)
        for m in range(depth, depth + 3):
            assert frobenius_section(f, b.n, m) == full


@st.composite
def series_with_twist(draw):
    f = draw(series())
    top = f.bound // f.p
    g = draw(series(p=f.p, e=f.e, d=f.d, bound=top, max_terms=3))
    return f, FiberSeries(f.p, f.e, f.d, f.bound, g.coeffs, g.pi)


@given(series_with_twist())
def test_twist_involution(fg):
    f, g = fg
    assert as_twist(as_twist(f, g, strict=True), -g, strict=True) == f


@given(series(), st.data())
def test_hadamard_extracts_branch(f, data):
    n = (1,) * f.d if f.d == 1 else tuple(data.draw(st.sampled_from([(1, 0), (0, 1), (1, 1), (2, 1), (1, 3)])))
    if max(n) > f.bound:
        return
    geo = geometric_as_branch(n, f.bound, f.p, f.e)
    out = hadamard(f, geo)
    want = {tuple(x * f.p**k for x in n) for k in range(branch_length(n, f.p, f.bound))}
    assert set(out.coeffs) <= want
    for k in want:
        assert out.coeff(k) == f.coeff(k)
    assert hadamard(f, geo) == hadamard(geo, f).over_pi(f.pi)

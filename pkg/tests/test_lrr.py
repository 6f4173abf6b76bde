import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from molly.errors import RecurrenceViolated, RelationFails, TooShort, TruncationTooShallow, ValidationError
from molly.ffield import AdditivePolynomial, additive_kernel, ext_build
from molly.lrr import (
    LRR,
    RLRR,
    branch_algebraicity_check,
    closed_form,
    extend_recurrence,
    extract_rlrr,
    f_additive,
    g_additive,
    telescope_identity,
    verify_lrr,
    verify_rlrr,
)
from molly.perfring import PuiseuxPoly
from molly.series import lambda_decompose
from oracles import prod_roots, subspace_polynomial, subspaces
from strategies import series


def test_constant_sequence():
    F = ext_build(3, 1)
    assert verify_lrr([F.one] * 5, [1, -1])
    assert verify_rlrr([F.one] * 5, [1, -1])


def test_too_short():
    F = ext_build(2, 1)
    with pytest.raises(TooShort):
        verify_lrr([F.one], [1, 1])


def test_subspace_polynomial_oracle():
    K = ext_build(2, 3)
    for basis, span in itertools.islice(subspaces(K, 2), 5):
        P = subspace_polynomial(basis, K)
        dense = prod_roots(sorted(span, key=lambda x: x.v), K)
        for i, c in enumerate(dense):
            expect = P.coeffs[[2**j for j in range(P.n + 1)].index(i)] if i in [2**j for j in range(P.n + 1)] else K.zero
            assert c == expect


@pytest.mark.parametrize("p,m,n", [(2, 2, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2), (2, 4, 3)])
def test_closed_form_round_trip(p, m, n):
    K = ext_build(p, m)
    for basis, _ in itertools.islice(subspaces(K, n), 3):
        P = subspace_polynomial(basis, K)
        L, z = additive_kernel(P)
        assert L == K
        for lam in itertools.islice(itertools.product(list(K.elements()), repeat=n), 0, None, 7):
            seq = closed_form(z, list(lam), LRR, n + 4)
            assert verify_lrr(seq, P)


def test_rlrr_closed_form_uses_reversed_polynomial():
    K = ext_build(2, 1)
    P = AdditivePolynomial([1, 0, 1, 1], K)
    rev = AdditivePolynomial(list(reversed(P.coeffs)), K)
    L, z = additive_kernel(rev)
    assert len(z) == 3
    PL = P.over(L)
    lam = [L.gen, L.gen**3, L.one]
    seq = closed_form(z, lam, RLRR, 8)
    assert verify_rlrr(seq, PL.coeffs)
    assert not verify_lrr(seq, PL.coeffs)


def test_perturbation_breaks_recurrence():
    K = ext_build(2, 2)
    P = AdditivePolynomial([1, 1], K)
    L, z = additive_kernel(P)
    seq = list(closed_form(z, [K.gen], LRR, 8).entries)
    for i in range(len(seq)):
        for delta in (K.one, K.gen):
            bad = list(seq)
            bad[i] = bad[i] + delta
            assert not verify_lrr(bad, P)


def test_extend_matches_closed_form():
    K = ext_build(3, 2)
    [basis, _] = next(subspaces(K, 1))
    P = subspace_polynomial(basis, K)
    z = basis
    for lam in K.elements():
        seq = closed_form(z, [lam], LRR, 6)
        assert extend_recurrence(P, seq.entries[:1], 6).entries == seq.entries


def test_recurrence_solutions_equal_closed_forms():
    # exhaustive over F_4, n <= 2: every sequence of length n+3 satisfying P is a closed form
    K = ext_build(2, 2)
    els = list(K.elements())
    for n in (1, 2):
        for basis, _ in subspaces(K, n):
            P = subspace_polynomial(basis, K)
            sols = {seq for seq in itertools.product(els, repeat=n + 3) if verify_lrr(seq, P)}
            forms = {closed_form(basis, list(lam), LRR, n + 3).entries for lam in itertools.product(els, repeat=n)}
            assert sols == forms


def _f4_sequence(length=12):
    K = ext_build(2, 2)
    d = AdditivePolynomial([1, 1], K)
    L, z = additive_kernel(d)
    return d, closed_form(z, [K.gen], LRR, length)


def test_telescope_f4_all_pairs():
    d, b = _f4_sequence()
    for n in range(10):
        for n2 in range(n + 1, 11):
            res = telescope_identity(d, b, n, n2)
            assert res.equal and res.lhs == res.rhs == res.via_g


def test_telescope_zero_sequence():
    K = ext_build(3, 1)
    d = AdditivePolynomial([1, 2, 1], K)
    res = telescope_identity(d, [K.zero] * 8, 0, 4)
    assert res.lhs == K.zero == res.rhs and res.equal


def test_telescope_checks_inputs():
    d, b = _f4_sequence()
    bad = list(b.entries)
    bad[3] = bad[3] + 1
    with pytest.raises(RecurrenceViolated):
        telescope_identity(d, bad, 0, 5)
    with pytest.raises(ValidationError):
        telescope_identity(d, b, 3, 3)
    with pytest.raises(TooShort):
        telescope_identity(d, b.entries[:5], 0, 6)
    K = d.field
    with pytest.raises(ValidationError):
        telescope_identity(AdditivePolynomial([1, K.gen], K), b, 0, 2)


@given(st.data())
def test_additive_functions_are_additive(data):
    p, m, deg = data.draw(st.sampled_from([(2, 2, 2), (3, 1, 2), (2, 3, 3), (3, 2, 1)]))
    K = ext_build(p, m)
    code = st.integers(0, p**m - 1).map(K.elem)
    d = [data.draw(code) for _ in range(deg)] + [K.one]
    xs = [data.draw(code) for _ in range(deg)]
    ys = [data.draw(code) for _ in range(deg)]
    both = [a + b for a, b in zip(xs, ys)]
    assert f_additive(d, both) == f_additive(d, xs) + f_additive(d, ys)
    assert g_additive(d, both) == g_additive(d, xs) + g_additive(d, ys)


def test_extract_geometric():
    res = extract_rlrr(2, [0, -1], [[-1], [1]], [1] * 10)
    assert res.c == (1, 1) and res.N == 1 and not res.degenerate
    assert res.tail_verified and res.tail_length == 9
    # -a_i^p + a_{i+1} = 0 on the tail, in verify_rlrr coefficient order
    assert res.recurrence() == (1, 1)


def test_extract_s_series():
    p = 3
    s = PuiseuxPoly.var(p, 1, 0)
    f = [s ** (p**i) for i in range(11)]
    # f^p = f - s X, hence s X = 1*f + (-1)*f^p
    res = extract_rlrr(p, [0, s], [[1], [-1]], f)
    assert [c.coeff((0,)) for c in res.c] == [1, 2]
    assert res.N == 1 and res.tail_verified and res.tail_length >= 10


def test_extract_degenerate_flag():
    res = extract_rlrr(2, [0, 0, 1], [[0, 1], [0, 1]], [1] * 10)
    assert res.degenerate and res.N == 2


def test_extract_errors():
    with pytest.raises(RelationFails):
        extract_rlrr(2, [0, 1, 1], [[1], [1]], [1] * 8)
    with pytest.raises(TruncationTooShallow):
        extract_rlrr(2, [0, 0, 0, 0, 0, 0, 0, 0, 0, 1], [[0] * 9 + [1], [0] * 9 + [1]], [1] * 3)


def test_extract_accepts_pairs():
    res = extract_rlrr(2, {1: 1}, [{0: 1}, {0: 1}], [(i, 1) for i in range(8)])
    assert res.N == 1 and res.tail_verified


@given(series())
def test_branch_identity(f):
    for b in lambda_decompose(f):
        assert branch_algebraicity_check(f, b.n)

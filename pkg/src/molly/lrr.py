"""Frobenius-twisted linear recurrences, their closed forms, the telescoping identity of the
associated additive functions, and rLRR extraction from an algebraic relation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    RecurrenceViolated,
    RelationFails,
    TooShort,
    TruncationTooShallow,
    ValidationError,
)
from .ffield import AdditivePolynomial, FFElem
from .perfring import PuiseuxPoly
from .series import FiberSeries, geometric_as_branch, hadamard, is_lambda

LRR = "LRR"
RLRR = "rLRR"


@dataclass(frozen=True)
class FrobSequence:
    entries: tuple
    kind: str = LRR

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def _entries(seq) -> list:
    return list(seq.entries if isinstance(seq, FrobSequence) else seq)


def _coeffs(c) -> list:
    return list(c.coeffs if isinstance(c, AdditivePolynomial) else c)


def _frob_powers(x, n: int) -> list:
    out = [x]
    for _ in range(n):
        x = x.frobenius()
        out.append(x)
    return out


def _window_sums(xs: list, cs: list, reverse: bool) -> Iterable:
    n = len(cs) - 1
    if len(xs) < n + 1:
        raise TooShort(f"sequence of length {len(xs)} is shorter than {n + 1}")
    pw = [_frob_powers(x, n) for x in xs]
    for k in range(len(xs) - n):
        acc = None
        for i, c in enumerate(cs):
            term = pw[k + i][n - i if reverse else i] * c
            acc = term if acc is None else acc + term
        yield acc


def verify_lrr(seq, coeffs) -> bool:
    """c_0 x_k + c_1 x_{k+1}^p + ... + c_n x_{k+n}^{p^n} = 0 for every window."""
    return not any(_window_sums(_entries(seq), _coeffs(coeffs), reverse=False))


def verify_rlrr(seq, coeffs) -> bool:
    """c_0 x_k^{p^n} + c_1 x_{k+1}^{p^{n-1}} + ... + c_n x_{k+n} = 0 for every window."""
    return not any(_window_sums(_entries(seq), _coeffs(coeffs), reverse=True))


def closed_form(z: Sequence[FFElem], lam: Sequence[FFElem], kind: str, length: int) -> FrobSequence:
    """x_k = sum z_i lam_i^{1/p^k} (LRR) or sum z_i lam_i^{p^k} (rLRR)."""
    if len(z) != len(lam):
        raise DimensionMismatch("z and lambda must have the same length")
    if kind not in (LRR, RLRR):
        raise ValidationError(f"kind must be {LRR} or {RLRR}")
    fields = {x.field for x in list(z) + list(lam)}
    if len(fields) > 1:
        raise DimensionMismatch("all elements must lie in one field")
    if not z:
        raise ValidationError("need at least one root")
    field = next(iter(fields))
    cur = list(lam)
    out = []
    for _ in range(length):
        acc = field.zero
        for zi, li in zip(z, cur):
            acc = acc + zi * li
        out.append(acc)
        cur = [li.p_root() if kind == LRR else li.frobenius() for li in cur]
    return FrobSequence(tuple(out), kind)


def extend_recurrence(coeffs, init: Sequence[FFElem], length: int, kind: str = LRR) -> FrobSequence:
    """Continue init to the given length using the recurrence solved for its last term."""
    cs = _coeffs(coeffs)
    n = len(cs) - 1
    if len(init) < n:
        raise TooShort("need n initial terms")
    if not cs[-1]:
        raise ValidationError("leading coefficient must be nonzero")
    xs = list(init)
    inv = cs[-1].inverse() if isinstance(cs[-1], FFElem) else None
    while len(xs) < length:
        k = len(xs) - n
        acc = None
        for i in range(n):
            term = cs[i] * (_frob_powers(xs[k + i], n)[n - i if kind == RLRR else i])
            acc = term if acc is None else acc + term
        rhs = -(acc * inv) if acc is not None else xs[0].field.zero
        if kind == LRR:
            for _ in range(n):
                rhs = rhs.p_root()
        xs.append(rhs)
    return FrobSequence(tuple(xs[:length]), kind)


def _addfun(d: list, xs: Sequence, lo, hi):
    acc = xs[0] * 0
    for i, di in enumerate(d):
        inner = None
        for j in range(lo(i), hi(i) + 1):
            inner = xs[j - 1] if inner is None else inner + xs[j - 1]
        if inner is None:
            continue
        for _ in range(i):
            inner = inner.frobenius()
        acc = acc + inner * di
    return acc


def f_additive(d: Sequence, xs: Sequence):
    """sum_i d_i (x_1 + ... + x_i)^{p^i}."""
    return _addfun(list(d), xs, lambda i: 1, lambda i: i)


def g_additive(d: Sequence, xs: Sequence):
    """sum_i d_i (x_{i+1} + ... + x_m)^{p^i}."""
    m = len(d) - 1
    return _addfun(list(d), xs, lambda i: i + 1, lambda i: m)


@dataclass(frozen=True)
class TelescopeResult:
    lhs: object  # P(S_{n,n'})
    rhs: object  # f(b_n) - f(b_{n'+1})
    via_g: object  # f(b_n) + g(b_{n'-m+1}, ..., b_{n'}) or None when n' < m - 1
    equal: bool


def telescope_identity(d: AdditivePolynomial, b, n: int, n2: int) -> TelescopeResult:
    """Both sides of P(b_n + ... + b_{n'}) = f(b_n, ..., b_{n+m-1}) - f(b_{n'+1}, ..., b_{n'+m})."""
    cs = _coeffs(d)
    m = len(cs) - 1
    if m < 1 or cs[-1] != 1:
        raise ValidationError("telescope identity needs a monic additive polynomial of degree p^m, m >= 1")
    if not 0 <= n < n2:
        raise ValidationError("need 0 <= n < n'")
    bs = _entries(b)
    if len(bs) < n2 + m + 1:
        raise TooShort(f"sequence needs at least {n2 + m + 1} terms")
    if not verify_lrr(bs[n : n2 + m + 1], cs):
        raise RecurrenceViolated("sequence does not satisfy the recurrence of d")
    S = bs[n]
    for x in bs[n + 1 : n2 + 1]:
        S = S + x
    lhs = S * 0
    for c, Sp in zip(cs, _frob_powers(S, m)):
        lhs = lhs + Sp * c
    f_n = f_additive(cs, bs[n : n + m])
    f_n2 = f_additive(cs, bs[n2 + 1 : n2 + m + 1])
    rhs = f_n - f_n2
    via_g = None
    if n2 - m + 1 >= 0:
        via_g = f_n + g_additive(cs, bs[n2 - m + 1 : n2 + 1])
    equal = lhs == rhs and (via_g is None or via_g == lhs)
    return TelescopeResult(lhs, rhs, via_g, equal)


# --- rLRR from an algebraic relation ---

@dataclass(frozen=True)
class RLRRExtraction:
    c: tuple  # constant terms of b_0..b_n
    N: int
    degenerate: bool  # c_n == 0
    tail_verified: bool
    tail_length: int

    def recurrence(self) -> tuple:
        """Coefficients in verify_rlrr order: 0 = c_n x_k^{p^n} + ... + c_0 x_{k+n}."""
        return tuple(reversed(self.c))


def _template(objs):
    for x in objs:
        if isinstance(x, (PuiseuxPoly, FFElem)):
            return x
    return None


def _ring_elem(x, template, p: int):
    if isinstance(x, (PuiseuxPoly, FFElem)):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        if isinstance(template, FFElem):
            return template.field(x)
        return PuiseuxPoly.const(p, template.e if template is not None else 0, x)
    raise ValidationError(f"unsupported coefficient {x!r}")


def _as_poly(coeffs, template, p: int) -> dict:
    """Dense list (index = degree) or {degree: coeff} -> sparse dict without zeros."""
    items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
    out = {}
    for deg, c in items:
        c = _ring_elem(c, template, p)
        if c:
            out[int(deg)] = c
    return out


def _values(obj) -> list:
    return list(obj.values() if isinstance(obj, Mapping) else obj)


def extract_rlrr(p: int, b, bs: Sequence, f) -> RLRRExtraction:
    """Given b = b_0 f + b_1 f^p + ... + b_n f^{p^n} with f = sum_i a_i X^{p^i} known for
    i <= T, read off the rLRR 0 = c_0 a_{i+n} + ... + c_n a_i^{p^n} valid for i >= N."""
    if not bs:
        raise ValidationError("relation needs at least b_0")
    if isinstance(f, Mapping):
        f_items = list(f.items())
    elif f and isinstance(f[0], (tuple, list)):
        f_items = [tuple(x) for x in f]
    else:
        f_items = list(enumerate(f))
    flat = [x for _, x in f_items] + _values(b)
    for bi in bs:
        flat += _values(bi)
    tmpl = _template(flat)
    zero = _ring_elem(0, tmpl, p)
    a = {int(i): _ring_elem(x, tmpl, p) for i, x in f_items}
    T = max(a) if a else -1
    bpoly = _as_poly(b, tmpl, p)
    bps = [_as_poly(bi, tmpl, p) for bi in bs]
    n = len(bps) - 1
    limit = p ** (T + 1)
    # right-hand side modulo X^{p^{T+1}}, where the truncation of f is invisible
    rhs: dict = {}
    for j, bj in enumerate(bps):
        for i, ai in a.items():
            power = p ** (i + j)
            if not ai or power >= limit:
                continue
            aij = ai
            for _ in range(j):
                aij = aij.frobenius()
            for deg, c in bj.items():
                t = deg + power
                if t < limit:
                    rhs[t] = rhs.get(t, zero) + c * aij
    for t in set(rhs) | set(bpoly):
        if t < limit and bpoly.get(t, zero) - rhs.get(t, zero):
            raise RelationFails(f"relation fails at X^{t}")
    M = max([max(bpoly, default=0)] + [max(bp, default=0) for bp in bps])
    N = 0
    while n + N - 1 < 0 or p ** (n + N - 1) <= M:
        N += 1
    if T < N + n:
        raise TruncationTooShallow(f"need a_i up to i = {N + n}, have {T}")
    c = tuple(bp.get(0, zero) for bp in bps)
    tail = [a.get(i, zero) for i in range(N, T + 1)]
    ok = verify_rlrr(tail, list(reversed(c)))
    return RLRRExtraction(c, N, not c[-1], ok, len(tail))


def branch_algebraicity_check(f: FiberSeries, n) -> bool:
    """hadamard(f, sum_k x^{p^k n}) equals h(x^n) with h(X) = sum_k a_{p^k n} X^{p^k}."""
    n = tuple(n)
    if not is_lambda(n, f.p):
        raise ValidationError(f"{n} is not a Lambda index")
    geo = geometric_as_branch(n, f.bound, f.p, f.e)
    lhs = hadamard(f, geo)
    coeffs = {}
    k = 0
    while max(x * f.p**k for x in n) <= f.bound:
        idx = tuple(x * f.p**k for x in n)
        if idx in f.coeffs:
            coeffs[idx] = f.coeffs[idx]
        k += 1
    rhs = FiberSeries(f.p, f.e, f.d, f.bound, coeffs, f.pi)
    return lhs == rhs

"""Finite fields F_p and F_{p^m} with deterministic moduli, plus additive polynomials."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import DegreeTooLarge, KernelNotFound, NotPrime, ValidationError

MAX_PRIME = 17
MAX_DEGREE = 12
# fields up to this size get exp/log tables
TABLE_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"p not prime: {p!r}")
    if p > MAX_PRIME:
        raise NotPrime(f"p={p} outside supported range 2..{MAX_PRIME}")
    return p


# --- dense polynomials over F_p, little-endian coefficient lists ---

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    r = list(a)
    _trim(r)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(r) - db, 1)
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        c = (r[-1] * inv_lead) % p
        q[shift] = c
        for i, bi in enumerate(b):
            r[shift + i] = (r[shift + i] - c * bi) % p
        _trim(r)
    return _trim(q), r


def _pmulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pdivmod(out, f, p)[1]


def _ppowmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pdivmod(a, f, p)[1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return _pdivmod(result, f, p)[1]


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [(c * inv) % p for c in a]
    return a


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin test: X^{p^m} = X mod f and no common factor with X^{p^k} - X for proper k | m."""
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    powers = []
    cur = x
    for _ in range(m):
        cur = _ppowmod(cur, p, f, p)
        powers.append(cur)
    if _psub(powers[-1], x, p):
        return False
    for k in range(1, m):
        if m % k == 0 and len(_pgcd(f, _psub(powers[k - 1], x, p), p)) > 1:
            return False
    return True


def _factor_int(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class ExtField:
    """F_{p^m} realised as F_p[X]/(modulus); elements are encoded as ints sum c_i p^i."""

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = tuple(modulus)
        self._exp: list[int] | None = None
        self._log: list[int] | None = None

    # identity
    @property
    def key(self) -> tuple:
        return (self.p, self.modulus)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtField) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"ExtField(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    # encoding
    def digits(self, v: int) -> list[int]:
        out = []
        for _ in range(self.m):
            v, r = divmod(v, self.p)
            out.append(r)
        return out

    def encode(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(coeffs)[: self.m]):
            v = v * self.p + (c % self.p)
        return v

    # raw arithmetic on encoded ints
    def add_raw(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        p, out, scale = self.p, 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * scale
            scale *= p
        return out

    def neg_raw(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        p, out, scale = self.p, 0, 1
        while a:
            a, r = divmod(a, p)
            out += ((-r) % p) * scale
            scale *= p
        return out

    def _tables(self) -> None:
        q = self.q
        if q == 2:
            self._exp, self._log = [1, 1], [0, 0]
            return
        order = q - 1
        primes = _factor_int(order)
        g = None
        for cand in range(1, q):
            if all(self._pow_poly(cand, order // r) != 1 for r in primes):
                g = cand
                break
        exp = [0] * (2 * order)
        log = [0] * q
        x = 1
        gpoly = self.digits(g)
        for i in range(order):
            exp[i] = x
            exp[i + order] = x
            log[x] = i
            x = self.encode(_pmulmod(self.digits(x), gpoly, self.modulus, self.p))
        self._exp, self._log = exp, log

    def _pow_poly(self, a: int, e: int) -> int:
        return self.encode(_ppowmod(self.digits(a), e, self.modulus, self.p))

    def mul_raw(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return (a * b) % self.p
        if self.q <= TABLE_LIMIT:
            if self._exp is None:
                self._tables()
            return self._exp[self._log[a] + self._log[b]]
        return self.encode(_pmulmod(self.digits(a), self.digits(b), self.modulus, self.p))

    def pow_raw(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 if e == 0 else 0
        order = self.q - 1
        e %= order
        if self.m == 1:
            return pow(a, e, self.p)
        if self.q <= TABLE_LIMIT:
            if self._exp is None:
                self._tables()
            return self._exp[(self._log[a] * e) % order]
        return self._pow_poly(a, e)

    # element-level API
    def __call__(self, value) -> "FFElem":
        if isinstance(value, FFElem):
            if value.field != self:
                raise ValidationError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FFElem(self, value % self.p)
        return FFElem(self, self.encode(value))

    def elem(self, v: int) -> "FFElem":
        if not 0 <= v < self.q:
            raise ValidationError(f"encoding {v} outside 0..{self.q - 1}")
        return FFElem(self, v)

    @property
    def zero(self) -> "FFElem":
        return FFElem(self, 0)

    @property
    def one(self) -> "FFElem":
        return FFElem(self, 1)

    @property
    def gen(self) -> "FFElem":
        """Class of X modulo the defining polynomial."""
        if self.m == 1:
            return FFElem(self, (-self.modulus[0]) % self.p)
        return FFElem(self, self.p)

    def elements(self) -> Iterator["FFElem"]:
        for v in range(self.q):
            yield FFElem(self, v)


class FFElem:
    __slots__ = ("field", "v")

    def __init__(self, field: ExtField, v: int):
        self.field = field
        self.v = v

    def _coerce(self, other) -> int:
        if isinstance(other, FFElem):
            if other.field is not self.field and other.field != self.field:
                raise ValidationError("mixed fields in arithmetic")
            return other.v
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, self.field.add_raw(self.v, o))

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, self.field.neg_raw(self.v))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, self.field.add_raw(self.v, self.field.neg_raw(o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, self.field.mul_raw(self.v, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return FFElem(self.field, self.field.pow_raw(self.v, e))

    def inverse(self) -> "FFElem":
        return self ** -1

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FFElem(self.field, self.field.pow_raw(o, -1))

    def frobenius(self) -> "FFElem":
        return self ** self.field.p

    def p_root(self) -> "FFElem":
        """Inverse Frobenius, x -> x^{p^{m-1}}."""
        return self ** (self.field.p ** (self.field.m - 1))

    def __eq__(self, other) -> bool:
        if isinstance(other, FFElem):
            return self.v == other.v and self.field == other.field
        if isinstance(other, int):
            return self.v == other % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.key, self.v))

    def __bool__(self) -> bool:
        return self.v != 0

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.field.digits(self.v)):
            if c:
                terms.append(str(c) if i == 0 else f"{c if c != 1 else ''}g{'' if i == 1 else '^' + str(i)}")
        return " + ".join(reversed(terms)) or "0"


@lru_cache(maxsize=None)
def ext_build(p: int, m: int) -> ExtField:
    """F_{p^m} with the least monic irreducible modulus (lower coefficients read as a base-p integer)."""
    check_prime(p)
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValidationError(f"degree must be a positive integer, got {m!r}")
    if m > MAX_DEGREE:
        raise DegreeTooLarge(f"extension degree {m} exceeds {MAX_DEGREE}")
    for low in range(p**m):
        coeffs = []
        v = low
        for _ in range(m):
            v, r = divmod(v, p)
            coeffs.append(r)
        f = coeffs + [1]
        if is_irreducible(f, p):
            return ExtField(p, m, f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def frobenius(a: FFElem) -> FFElem:
    return a.frobenius()


class FieldEmbedding:
    """The F_p-algebra map K -> L sending the generator of K to a fixed root of its modulus in L."""

    def __init__(self, source: ExtField, target: ExtField):
        if source.p != target.p or target.m % source.m:
            raise ValidationError(f"{source} does not embed in {target}")
        self.source, self.target = source, target
        if source.m == 1 or source == target:
            self.root = None if source.m == 1 else target.gen
        else:
            self.root = _least_root(source.modulus, target)
        self._powers = None
        if self.root is not None:
            pw, cur = [], target.one
            for _ in range(source.m):
                pw.append(cur)
                cur = cur * self.root
            self._powers = pw

    def __call__(self, a) -> FFElem:
        if isinstance(a, int):
            return self.target(a)
        if a.field != self.source:
            raise ValidationError("element not in the embedding's source field")
        if self._powers is None:
            return FFElem(self.target, a.v)
        out = self.target.zero
        for c, pw in zip(self.source.digits(a.v), self._powers):
            if c:
                out = out + pw * c
        return out


def _least_root(f: Sequence[int], L: ExtField) -> FFElem:
    for z in L.elements():
        acc = L.zero
        for c in reversed(f):
            acc = acc * z + c
        if not acc:
            return z
    raise ValidationError("modulus has no root in target field")


@lru_cache(maxsize=None)
def embedding(source: ExtField, target: ExtField) -> FieldEmbedding:
    return FieldEmbedding(source, target)


class AdditivePolynomial:
    """P(X) = sum c_i X^{p^i} with coefficients in a finite field."""

    def __init__(self, coeffs: Sequence, field: ExtField | None = None):
        if not coeffs:
            raise ValidationError("additive polynomial needs at least one coefficient")
        if field is None:
            field = next((c.field for c in coeffs if isinstance(c, FFElem)), None)
            if field is None:
                raise ValidationError("field required when all coefficients are ints")
        self.field = field
        self.p = field.p
        self.coeffs = tuple(field(c) for c in coeffs)

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: FFElem) -> FFElem:
        acc = x.field.zero
        term = x
        emb = embedding(self.field, x.field) if x.field != self.field else None
        for c in self.coeffs:
            if c:
                acc = acc + (emb(c) if emb else c) * term
            term = term.frobenius()
        return acc

    def over(self, L: ExtField) -> "AdditivePolynomial":
        emb = embedding(self.field, L)
        return AdditivePolynomial([emb(c) for c in self.coeffs], L)

    def __repr__(self) -> str:
        return f"AdditivePolynomial({list(self.coeffs)!r})"


def _nullspace_mod_p(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : A x = 0} for A given by rows."""
    a = [r[:] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-a[i][fc]) % p
        basis.append(vec)
    return basis


def additive_kernel(P: AdditivePolynomial, search_bound: int = 8) -> tuple[ExtField, list[FFElem]]:
    """Smallest F_{p^{mj}} (j <= search_bound) holding the full root space of P, and an F_p-basis of it."""
    if not P.coeffs[0] or not P.coeffs[-1]:
        raise ValidationError("additive_kernel needs c_0 != 0 and c_n != 0")
    K, p, n = P.field, P.p, P.n
    if n == 0:
        return K, []
    for j in range(1, search_bound + 1):
        if K.m * j > MAX_DEGREE:
            break
        L = ext_build(p, K.m * j)
        PL = P.over(L)
        # column i of the matrix is P applied to the power-basis vector X^i
        cols = [L.digits(PL(L.elem(p**i)).v) for i in range(L.m)]
        rows = [[cols[i][r] for i in range(L.m)] for r in range(L.m)]
        ker = _nullspace_mod_p(rows, L.m, p)
        if len(ker) == n:
            return L, [L.elem(L.encode(vec)) for vec in ker]
    raise KernelNotFound(f"root space of dimension {n} not reached within search bound {search_bound}")


def span(basis: Sequence[FFElem], p: int) -> Iterable[FFElem]:
    """All F_p-linear combinations of basis (empty basis gives nothing to enumerate)."""
    if not basis:
        return
    field = basis[0].field
    n = len(basis)
    for idx in range(p**n):
        acc, v = field.zero, idx
        for b in basis:
            v, c = divmod(v, p)
            if c:
                acc = acc + b * c
        yield acc

"""Sparse Laurent polynomials over F_p with exponents in Z[1/p]."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import NotAMonomial, ValidationError, VariableCountMismatch
from .ffield import check_prime

Exps = tuple  # tuple[Fraction, ...]


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def parse_exponent(x, p: int) -> Fraction:
    """Accepts ints, Fractions or "a/b" strings; the denominator must be a power of p."""
    if isinstance(x, bool):
        raise ValidationError(f"bad exponent {x!r}")
    try:
        f = Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad exponent {x!r}") from exc
    if not _is_p_power(f.denominator, p):
        raise ValidationError(f"exponent {x} has denominator not a power of {p}")
    return f


def fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def grlex_key(exps: Exps) -> tuple:
    return (sum(exps), exps)


class PuiseuxPoly:
    """Finitely supported sum of c * s^k, c in F_p, k in Z[1/p]^e.

    Values are immutable; every operation returns a new canonical object.
    """

    __slots__ = ("p", "e", "_terms", "_hash")

    def __init__(self, p: int, e: int, terms: Mapping[Exps, int] | Iterable[tuple[Exps, int]] = ()):
        self.p = p
        self.e = e
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exps, int] = {}
        for k, c in items:
            k = tuple(Fraction(x) for x in k)
            if len(k) != e:
                raise VariableCountMismatch(f"exponent vector {k} has length {len(k)}, expected {e}")
            acc[k] = (acc.get(k, 0) + c) % p
        self._terms = {k: c for k, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, p: int, e: int, terms: dict) -> "PuiseuxPoly":
        obj = cls.__new__(cls)
        obj.p, obj.e, obj._terms, obj._hash = p, e, terms, None
        return obj

    # constructors
    @classmethod
    def zero(cls, p: int, e: int) -> "PuiseuxPoly":
        return cls._raw(p, e, {})

    @classmethod
    def const(cls, p: int, e: int, c: int = 1) -> "PuiseuxPoly":
        c %= p
        return cls._raw(p, e, {(Fraction(0),) * e: c} if c else {})

    @classmethod
    def monomial(cls, p: int, exps: Sequence, coeff: int = 1) -> "PuiseuxPoly":
        k = tuple(parse_exponent(x, p) for x in exps)
        return cls(p, len(k), {k: coeff})

    @classmethod
    def var(cls, p: int, e: int, i: int, power=1) -> "PuiseuxPoly":
        k = [Fraction(0)] * e
        k[i] = parse_exponent(power, p)
        return cls._raw(p, e, {tuple(k): 1})

    # inspection
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def support(self) -> list:
        return sorted(self._terms, key=grlex_key)

    def coeff(self, exps: Sequence) -> int:
        return self._terms.get(tuple(Fraction(x) for x in exps), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return all(not any(k) for k in self._terms)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for k in self._terms for x in k)

    def leading(self) -> tuple[Exps, int]:
        if len(self._terms) != 1:
            raise NotAMonomial("expected a single-term polynomial")
        return next(iter(self._terms.items()))

    # arithmetic
    def _check(self, other: "PuiseuxPoly") -> None:
        if self.e != other.e:
            raise VariableCountMismatch(f"{self.e} vs {other.e} base variables")
        if self.p != other.p:
            raise ValidationError(f"prime mismatch {self.p} vs {other.p}")

    def _lift(self, other) -> "PuiseuxPoly":
        if isinstance(other, PuiseuxPoly):
            self._check(other)
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return PuiseuxPoly.const(self.p, self.e, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PuiseuxPoly._raw(p, self.e, out)

    __radd__ = __add__

    def __neg__(self) -> "PuiseuxPoly":
        p = self.p
        return PuiseuxPoly._raw(p, self.e, {k: (-c) % p for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.p
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = (out.get(k, 0) + c1 * c2) % p
        return PuiseuxPoly._raw(p, self.e, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PuiseuxPoly":
        if n < 0:
            exps, c = self.leading()
            inv = pow(c, -1, self.p)
            return PuiseuxPoly._raw(self.p, self.e, {tuple(x * n for x in exps): pow(inv, -n, self.p)})
        result = PuiseuxPoly.const(self.p, self.e, 1)
        base = self
        while n:
            # p-th powers are exponent scalings, much cheaper than products
            if n % self.p == 0:
                base = base.frobenius()
                n //= self.p
                continue
            result = result * base
            n -= 1
        return result

    def scale_exponents(self, factor: Fraction) -> "PuiseuxPoly":
        return PuiseuxPoly._raw(
            self.p, self.e, {tuple(x * factor for x in k): c for k, c in self._terms.items()}
        )

    def frobenius(self) -> "PuiseuxPoly":
        """f^p: coefficients in F_p are fixed, exponents scale by p."""
        return self.scale_exponents(Fraction(self.p))

    def p_root(self) -> "PuiseuxPoly":
        return self.scale_exponents(Fraction(1, self.p))

    def frobenius_iter(self, k: int) -> "PuiseuxPoly":
        """f^{p^k} for k >= 0, or the |k|-fold p-th root for k < 0."""
        return self.scale_exponents(Fraction(self.p) ** k)

    def divide_monomial(self, m: "PuiseuxPoly") -> "PuiseuxPoly":
        self._check(m)
        if not m.is_monomial():
            raise NotAMonomial("divisor must have exactly one term")
        mk, mc = m.leading()
        inv = pow(mc, -1, self.p)
        return PuiseuxPoly._raw(
            self.p,
            self.e,
            {tuple(a - b for a, b in zip(k, mk)): (c * inv) % self.p for k, c in self._terms.items()},
        )

    def restrict(self, keep) -> "PuiseuxPoly":
        """Sub-polynomial of the terms whose exponent vector satisfies keep."""
        return PuiseuxPoly._raw(self.p, self.e, {k: c for k, c in self._terms.items() if keep(k)})

    def extend_vars(self, e_new: int, positions: Sequence[int]) -> "PuiseuxPoly":
        """Re-embed into e_new variables, old variable i going to positions[i]."""
        out = {}
        for k, c in self._terms.items():
            nk = [Fraction(0)] * e_new
            for i, x in zip(positions, k):
                nk[i] = x
            out[tuple(nk)] = c
        return PuiseuxPoly._raw(self.p, e_new, out)

    # comparison / hashing
    def __eq__(self, other) -> bool:
        if isinstance(other, PuiseuxPoly):
            return self.p == other.p and self.e == other.e and self._terms == other._terms
        if isinstance(other, int) and not isinstance(other, bool):
            return self == PuiseuxPoly.const(self.p, self.e, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.e, frozenset(self._terms.items())))
        return self._hash

    # serialization
    def to_json(self) -> list[dict]:
        return [{"coeff": c, "exps": [fmt_fraction(x) for x in k]} for k, c in self.items()]

    @classmethod
    def from_json(cls, data, p: int, e: int) -> "PuiseuxPoly":
        if isinstance(data, dict):
            data = [data]
        if isinstance(data, int) and not isinstance(data, bool):
            return cls.const(p, e, data)
        if not isinstance(data, list):
            raise ValidationError(f"polynomial must be a list of terms, got {type(data).__name__}")
        terms = []
        for t in data:
            if not isinstance(t, dict) or "coeff" not in t or "exps" not in t:
                raise ValidationError(f"malformed term {t!r}")
            c = t["coeff"]
            if isinstance(c, bool) or not isinstance(c, int):
                raise ValidationError(f"coefficient must be an integer, got {c!r}")
            exps = t["exps"]
            if not isinstance(exps, list) or len(exps) != e:
                raise VariableCountMismatch(f"term {t!r} needs {e} exponents")
            terms.append((tuple(parse_exponent(x, p) for x in exps), c))
        return cls(p, e, terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in self.items():
            mono = "*".join(
                f"s{i}" if x == 1 else f"s{i}^({fmt_fraction(x)})" for i, x in enumerate(k) if x
            )
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def make_ring(p: int, e: int):
    check_prime(p)
    return lambda terms=(): PuiseuxPoly(p, e, terms)


def add(f: PuiseuxPoly, g: PuiseuxPoly) -> PuiseuxPoly:
    f._check(g)
    return f + g


def mul(f: PuiseuxPoly, g: PuiseuxPoly) -> PuiseuxPoly:
    f._check(g)
    return f * g


def neg(f: PuiseuxPoly) -> PuiseuxPoly:
    return -f


def frobenius(f: PuiseuxPoly) -> PuiseuxPoly:
    return f.frobenius()


def p_root(f: PuiseuxPoly) -> PuiseuxPoly:
    return f.p_root()


def divide_monomial(f: PuiseuxPoly, m: PuiseuxPoly) -> PuiseuxPoly:
    return f.divide_monomial(m)

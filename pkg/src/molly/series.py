"""Truncated fiber series sum a_k x^k / pi and their Frobenius branch structure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BoundOverflow, DimensionMismatch, NotAMonomial, ValidationError, VariableCountMismatch
from .perfring import PuiseuxPoly, fmt_fraction

Index = tuple  # tuple[int, ...]


def index_key(k: Index) -> tuple:
    return (sum(k), k)


def lambda_reduce(k: Index, p: int) -> tuple[Index, int]:
    """Write k = p^K * n with n not divisible by p; k must be nonzero."""
    if not any(k):
        raise ValidationError("the zero index has no branch")
    K = 0
    while all(x % p == 0 for x in k):
        k = tuple(x // p for x in k)
        K += 1
    return k, K


def is_lambda(n: Index, p: int) -> bool:
    return any(n) and any(x % p for x in n)


class FiberSeries:
    """Coefficients a_k (PuiseuxPoly, numerators) for k in the box [0, D]^d, over a monomial pi."""

    __slots__ = ("p", "e", "d", "bound", "coeffs", "pi")

    def __init__(
        self,
        p: int,
        e: int,
        d: int,
        bound: int,
        coeffs: Mapping[Index, PuiseuxPoly] | Iterable[tuple[Index, PuiseuxPoly]] = (),
        pi: PuiseuxPoly | None = None,
    ):
        if bound < 0:
            raise ValidationError("bound must be nonnegative")
        self.p, self.e, self.d, self.bound = p, e, d, bound
        if pi is None:
            pi = PuiseuxPoly.const(p, e, 1)
        if pi.e != e:
            raise VariableCountMismatch("pi lives in a different number of base variables")
        if not pi.is_monomial():
            raise NotAMonomial("pi must be a single monomial")
        if not pi.is_integral():
            raise ValidationError("pi must have integer exponents")
        self.pi = pi
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[Index, PuiseuxPoly] = {}
        for k, a in items:
            k = tuple(int(x) for x in k)
            if len(k) != d:
                raise DimensionMismatch(f"index {k} has length {len(k)}, expected {d}")
            if any(x < 0 or x > bound for x in k):
                raise ValidationError(f"index {k} outside the box [0, {bound}]^{d}")
            if a.e != e or a.p != p:
                raise VariableCountMismatch(f"coefficient at {k} has incompatible ring")
            acc[k] = acc[k] + a if k in acc else a
        self.coeffs = {k: a for k, a in acc.items() if a}

    # inspection
    def coeff(self, k: Index) -> PuiseuxPoly:
        return self.coeffs.get(tuple(k), PuiseuxPoly.zero(self.p, self.e))

    def value_coeff(self, k: Index) -> PuiseuxPoly:
        """a_k / pi."""
        return self.coeff(k).divide_monomial(self.pi)

    def indices(self) -> list[Index]:
        return sorted(self.coeffs, key=index_key)

    def nonconstant_indices(self) -> list[Index]:
        return [k for k in self.indices() if any(k)]

    def items(self):
        return [(k, self.coeffs[k]) for k in self.indices()]

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_degree(self) -> int:
        return max((max(k) for k in self.coeffs), default=0)

    def in_box(self, k: Index) -> bool:
        return all(0 <= x <= self.bound for x in k)

    # structural variants
    def with_bound(self, bound: int) -> "FiberSeries":
        if bound < self.max_degree():
            raise ValidationError("new bound would drop coefficients")
        return FiberSeries(self.p, self.e, self.d, bound, self.coeffs, self.pi)

    def over_pi(self, pi: PuiseuxPoly) -> "FiberSeries":
        """Same element rewritten over another monomial denominator."""
        factor = pi.divide_monomial(self.pi)
        return FiberSeries(self.p, self.e, self.d, self.bound, {k: a * factor for k, a in self.coeffs.items()}, pi)

    def map_coeffs(self, fn) -> "FiberSeries":
        return FiberSeries(self.p, self.e, self.d, self.bound, {k: fn(a) for k, a in self.coeffs.items()}, self.pi)

    def drop_constant(self) -> "FiberSeries":
        zero = (0,) * self.d
        return FiberSeries(self.p, self.e, self.d, self.bound, {k: a for k, a in self.coeffs.items() if k != zero}, self.pi)

    def _compatible(self, other: "FiberSeries") -> None:
        if (self.p, self.e, self.d) != (other.p, other.e, other.d):
            raise DimensionMismatch("series differ in p, base or fiber variable count")

    def __neg__(self) -> "FiberSeries":
        return self.map_coeffs(lambda a: -a)

    def __add__(self, other: "FiberSeries") -> "FiberSeries":
        self._compatible(other)
        other = other.over_pi(self.pi) if other.pi != self.pi else other
        bound = max(self.bound, other.bound)
        acc = dict(self.coeffs)
        for k, a in other.coeffs.items():
            acc[k] = acc[k] + a if k in acc else a
        return FiberSeries(self.p, self.e, self.d, bound, acc, self.pi)

    def __sub__(self, other: "FiberSeries") -> "FiberSeries":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiberSeries):
            return NotImplemented
        return (
            (self.p, self.e, self.d, self.bound) == (other.p, other.e, other.d, other.bound)
            and self.pi == other.pi
            and self.coeffs == other.coeffs
        )

    def same_element(self, other: "FiberSeries") -> bool:
        """Equality of the represented elements, ignoring bound and choice of pi."""
        if (self.p, self.e, self.d) != (other.p, other.e, other.d):
            return False
        a = {k: c.divide_monomial(self.pi) for k, c in self.coeffs.items()}
        b = {k: c.divide_monomial(other.pi) for k, c in other.coeffs.items()}
        return a == b

    def __repr__(self) -> str:
        body = " + ".join(f"({a})*x^{list(k)}" for k, a in self.items()) or "0"
        return f"FiberSeries[D={self.bound}]({body}) / ({self.pi})"

    # serialization
    def to_json(self) -> dict:
        exps, c = self.pi.leading()
        return {
            "terms": [{"index": list(k), "coeff": a.to_json()} for k, a in self.items()],
            "pi": {"coeff": c, "exps": [fmt_fraction(x) for x in exps]},
        }

    @classmethod
    def from_json(cls, data: Mapping, p: int, e: int, d: int, bound: int) -> "FiberSeries":
        if not isinstance(data, Mapping):
            raise ValidationError("series must be an object with 'terms'")
        terms = data.get("terms", [])
        if not isinstance(terms, list):
            raise ValidationError("'terms' must be a list")
        coeffs = []
        for t in terms:
            if not isinstance(t, Mapping) or "index" not in t or "coeff" not in t:
                raise ValidationError(f"malformed series term {t!r}")
            idx = t["index"]
            if not isinstance(idx, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in idx):
                raise ValidationError(f"index must be a list of integers, got {idx!r}")
            coeffs.append((tuple(idx), PuiseuxPoly.from_json(t["coeff"], p, e)))
        pi = PuiseuxPoly.from_json(data["pi"], p, e) if data.get("pi") is not None else None
        return cls(p, e, d, bound, coeffs, pi)


@dataclass(frozen=True)
class BranchSequence:
    n: Index
    entries: tuple  # a_n, a_{pn}, a_{p^2 n}, ... (numerators)

    def __len__(self) -> int:
        return len(self.entries)


def branch_length(n: Index, p: int, bound: int) -> int:
    """1 + max{k : p^k n inside the box}."""
    top = max(n)
    length = 0
    while top <= bound:
        length += 1
        top *= p
    return length


def lambda_decompose(f: FiberSeries) -> list[BranchSequence]:
    """Group the nonzero nonconstant coefficients into the chains a_n, a_{pn}, ... for n in Lambda."""
    p = f.p
    heads = sorted({lambda_reduce(k, p)[0] for k in f.nonconstant_indices()}, key=index_key)
    out = []
    for n in heads:
        L = branch_length(n, p, f.bound)
        entries = tuple(f.coeff(tuple(x * p**k for x in n)) for k in range(L))
        out.append(BranchSequence(n, entries))
    return out


def frobenius_section(f: FiberSeries, n: Index, m: int) -> PuiseuxPoly:
    """sum_{k <= m} (a_{p^k n}/pi)^{1/p^k}, cut off where p^k n leaves the box."""
    n = tuple(n)
    if not is_lambda(n, f.p):
        raise ValidationError(f"{n} is not a Lambda index")
    if m < 0:
        raise ValidationError("depth must be nonnegative")
    p = f.p
    total = PuiseuxPoly.zero(p, f.e)
    L = branch_length(n, p, f.bound)
    for k in range(min(m, L - 1) + 1):
        idx = tuple(x * p**k for x in n)
        a = f.coeffs.get(idx)
        if a is not None:
            total = total + a.divide_monomial(f.pi).frobenius_iter(-k)
    return total


def full_section(f: FiberSeries, n: Index) -> PuiseuxPoly:
    return frobenius_section(f, n, branch_length(tuple(n), f.p, f.bound))


def as_twist(f: FiberSeries, g: FiberSeries, strict: bool = False) -> FiberSeries:
    """f + (g^p - g), kept over f's denominator and box.

    Indices of g^p beyond the box are dropped, or raise BoundOverflow when strict.
    """
    f._compatible(g)
    p = f.p
    acc = dict(f.coeffs)

    def bump(k, delta):
        acc[k] = acc[k] + delta if k in acc else delta

    for k, b in g.coeffs.items():
        value = b.divide_monomial(g.pi)
        if f.in_box(k):
            bump(k, -(value * f.pi))
        elif strict:
            raise BoundOverflow(f"mollifier index {k} outside box {f.bound}")
        kp = tuple(x * p for x in k)
        if f.in_box(kp):
            bump(kp, value.frobenius() * f.pi)
        elif strict:
            raise BoundOverflow(f"g^p reaches index {kp} beyond box {f.bound}")
    return FiberSeries(p, f.e, f.d, f.bound, acc, f.pi)


def twist_fits(f: FiberSeries, g: FiberSeries) -> bool:
    return all(f.in_box(tuple(x * f.p for x in k)) for k in g.coeffs)


def hadamard(f: FiberSeries, g: FiberSeries) -> FiberSeries:
    if (f.p, f.e, f.d, f.bound) != (g.p, g.e, g.d, g.bound):
        raise DimensionMismatch("hadamard needs equal p, variable counts and bound")
    coeffs = {k: a * g.coeffs[k] for k, a in f.coeffs.items() if k in g.coeffs}
    return FiberSeries(f.p, f.e, f.d, f.bound, coeffs, f.pi * g.pi)


def geometric_as_branch(n: Index, bound: int, p: int, e: int = 0) -> FiberSeries:
    """sum_k x^{p^k n} over the box; satisfies g - g^p = x^n up to truncation."""
    n = tuple(n)
    if not is_lambda(n, p):
        raise ValidationError(f"{n} is not a Lambda index")
    one = PuiseuxPoly.const(p, e, 1)
    coeffs = {tuple(x * p**k for x in n): one for k in range(branch_length(n, p, bound))}
    return FiberSeries(p, e, len(n), bound, coeffs)


def monomial_series(p: int, e: int, d: int, bound: int, k: Index, coeff: PuiseuxPoly, pi=None) -> FiberSeries:
    return FiberSeries(p, e, d, bound, {tuple(k): coeff}, pi)

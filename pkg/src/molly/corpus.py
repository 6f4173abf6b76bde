"""Seeded random instance generators shared by the property suites and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from .ffield import AdditivePolynomial, ExtField, ext_build
from .perfring import PuiseuxPoly
from .series import FiberSeries
from .valuation import ToricValuation

PRIMES = (2, 3, 5)


def rng_for(seed: int, *salt) -> random.Random:
    return random.Random(repr((seed,) + salt))


def random_exponent(rng: random.Random, p: int, lo: int, hi: int, depth: int) -> Fraction:
    j = rng.randint(0, depth)
    q = p**j
    return Fraction(rng.randint(lo * q, hi * q), q)


def random_poly(
    rng: random.Random,
    p: int,
    e: int,
    nterms: int,
    lo: int = -2,
    hi: int = 3,
    depth: int = 1,
    fixed: dict | None = None,
) -> PuiseuxPoly:
    """Sparse polynomial with exponents in [lo, hi] and denominators up to p^depth.

    fixed maps a coordinate to an (lo, hi) integer range that overrides the default there.
    """
    fixed = fixed or {}
    terms = {}
    for _ in range(nterms):
        exps = []
        for i in range(e):
            if i in fixed:
                a, b = fixed[i]
                exps.append(Fraction(rng.randint(a, b)))
            else:
                exps.append(random_exponent(rng, p, lo, hi, depth))
        terms[tuple(exps)] = rng.randint(1, p - 1)
    return PuiseuxPoly(p, e, terms)


def random_pi(rng: random.Random, p: int, e: int, max_exp: int = 2, avoid: tuple = ()) -> PuiseuxPoly:
    exps = [0 if i in avoid else rng.randint(0, max_exp) for i in range(e)]
    if not any(exps):
        free = [i for i in range(e) if i not in avoid]
        exps[rng.choice(free)] = 1
    return PuiseuxPoly.monomial(p, exps)


def random_weights(rng: random.Random, e: int, max_num: int = 9, max_den: int = 4) -> ToricValuation:
    return ToricValuation([Fraction(rng.randint(1, max_num), rng.randint(1, max_den)) for _ in range(e)])


def random_index(rng: random.Random, d: int, bound: int, nonzero: bool = True) -> tuple:
    while True:
        k = tuple(rng.randint(0, bound) for _ in range(d))
        if any(k) or not nonzero:
            return k


def random_series(
    rng: random.Random,
    p: int,
    e: int,
    d: int,
    bound: int,
    nterms: int | None = None,
    pi: PuiseuxPoly | None = None,
    **poly_kw,
) -> FiberSeries:
    nterms = rng.randint(1, 5) if nterms is None else nterms
    coeffs = {}
    for _ in range(nterms):
        k = random_index(rng, d, bound, nonzero=rng.random() < 0.9)
        coeffs[k] = random_poly(rng, p, e, rng.randint(1, 3), **poly_kw)
    return FiberSeries(p, e, d, bound, coeffs, pi if pi is not None else random_pi(rng, p, e))


def random_inbox_twist(rng: random.Random, h: FiberSeries, nterms: int | None = None, **poly_kw) -> FiberSeries:
    """Random g with every index k satisfying p*k inside h's box."""
    top = h.bound // h.p
    nterms = rng.randint(1, 3) if nterms is None else nterms
    coeffs = {}
    for _ in range(nterms):
        k = random_index(rng, h.d, top, nonzero=top > 0)
        coeffs[k] = random_poly(rng, h.p, h.e, rng.randint(1, 2), **poly_kw)
    return FiberSeries(h.p, h.e, h.d, h.bound, coeffs)


def random_shape(rng: random.Random, max_e: int = 3, max_d: int = 2, max_bound: int = 18) -> tuple:
    p = rng.choice(PRIMES)
    return p, rng.randint(1, max_e), rng.randint(1, max_d), rng.randint(p, max_bound)


# --- instance families used by the acceptance criteria ---

def intro_instance(p: int, us, ut) -> tuple[FiberSeries, ToricValuation]:
    """h = x^p/s + t x/s over base variables (s, t)."""
    s = PuiseuxPoly.var(p, 2, 0)
    t = PuiseuxPoly.var(p, 2, 1)
    one = PuiseuxPoly.const(p, 2, 1)
    h = FiberSeries(p, 2, 1, p * p, {(p,): one, (1,): t}, s)
    return h, ToricValuation([us, ut])


def twist_instances(seed: int, count: int) -> Iterator[tuple[FiberSeries, FiberSeries, ToricValuation]]:
    """(h, g, v) with g^p inside the box of h."""
    rng = rng_for(seed, "twist")
    for _ in range(count):
        p, e, d, bound = random_shape(rng)
        h = random_series(rng, p, e, d, bound)
        yield h, random_inbox_twist(rng, h), random_weights(rng, e)


def _lift_index(k: tuple, p: int, bound: int) -> tuple:
    kp = tuple(x * p for x in k)
    return kp if max(kp) <= bound else k


def _polar_twist(rng: random.Random, h: FiberSeries, v: ToricValuation) -> FiberSeries:
    """A twist whose g carries strongly negative values, so the result is usually not weakly admissible."""
    top = h.bound // h.p
    coeffs = {}
    for _ in range(rng.randint(1, 2)):
        k = random_index(rng, h.d, max(top, 1)) if top else None
        if k is None:
            break
        coeffs[k] = random_poly(rng, h.p, h.e, 1, lo=-3, hi=1)
    if not coeffs:
        return FiberSeries(h.p, h.e, h.d, h.bound, {}, h.pi)
    return FiberSeries(h.p, h.e, h.d, h.bound, coeffs)


def negative_instances(seed: int, count: int, integral: bool = False) -> Iterator[tuple[FiberSeries, ToricValuation]]:
    """Instances with npinf < 0, roughly half of them built by polar twisting.

    integral keeps every exponent a nonnegative integer in the numerators, so the
    value semigroup is generated by the base variables.
    """
    from . import np as npm
    from .series import as_twist

    rng = rng_for(seed, "negative", integral)
    made = 0
    while made < count:
        p, e, d, bound = random_shape(rng, max_bound=12 if integral else 18)
        kw = {"lo": 0, "hi": 3, "depth": 0} if integral else {}
        v = ToricValuation([Fraction(rng.randint(1, 5)) for _ in range(e)]) if integral else random_weights(rng, e)
        h = random_series(rng, p, e, d, bound, **kw)
        if rng.random() < 0.5:
            if integral:
                # push coefficients onto p-divisible indices so the symbol tends to be inseparable
                h = FiberSeries(p, e, d, bound, {_lift_index(k, p, bound): a for k, a in h.coeffs.items()}, h.pi)
            else:
                h = as_twist(h, _polar_twist(rng, h, v))
        if npm.npinf(h, v) < 0:
            made += 1
            yield h, v


def monotone_instances(seed: int, count: int) -> Iterator[tuple[FiberSeries, ToricValuation, ToricValuation, int]]:
    """(h, v, v', t) with pi free of coordinate t, nonnegative t-exponents and v'(t) >= v(t)."""
    rng = rng_for(seed, "monotone")
    for _ in range(count):
        p, e, d, bound = random_shape(rng)
        e = max(e, 2)
        t = rng.randrange(e)
        pi = random_pi(rng, p, e, avoid=(t,))
        h = random_series(rng, p, e, d, bound, pi=pi, fixed={t: (0, 3)})
        v = random_weights(rng, e)
        w = list(v.weights)
        w[t] = w[t] + Fraction(rng.randint(0, 12), rng.randint(1, 4))
        yield h, v, ToricValuation(w), t


def monomial_instances(seed: int, count: int) -> Iterator[tuple[FiberSeries, ToricValuation]]:
    """Integer-exponent f over a monomial pi with generic weights; half are twists of regular data."""
    from .errors import WeightsDependent
    from .mollify import mollify_monomial

    rng = rng_for(seed, "monomial")
    made = 0
    while made < count:
        p = rng.choice(PRIMES)
        e, d = rng.randint(1, 3), rng.randint(1, 2)
        bound = rng.randint(p, 12)
        pi = random_pi(rng, p, e)
        kw = {"lo": 0, "hi": 3, "depth": 0}
        if rng.random() < 0.5:
            f = random_series(rng, p, e, d, bound, pi=pi, **kw)
        else:
            # f/pi = regular + (g^p - g) with g polar and x-dependent
            reg = random_series(rng, p, e, d, bound, pi=PuiseuxPoly.const(p, e, 1), **kw)
            top = bound // p
            gco = {}
            for _ in range(rng.randint(1, 2)):
                k = random_index(rng, d, top)
                gco[k] = random_poly(rng, p, e, 1, lo=-2, hi=0, depth=0)
            from .series import as_twist

            h = as_twist(reg, FiberSeries(p, e, d, bound, gco))
            f = FiberSeries(p, e, d, bound, {k: a * pi for k, a in h.coeffs.items()}, pi)
        for _ in range(20):
            v = ToricValuation([Fraction(rng.randint(1, 97), rng.randint(1, 13)) for _ in range(e)])
            try:
                mollify_monomial(f, v)
            except WeightsDependent:
                continue
            made += 1
            yield f, v
            break


def polygon_family(seed: int, count: int) -> Iterator[tuple[FiberSeries, list, list]]:
    """(h, U0, direction) with pi free of the direction's support and nonnegative exponents there."""
    rng = rng_for(seed, "polygon")
    for _ in range(count):
        p, e, d, bound = random_shape(rng)
        e = max(e, 2)
        moving = set(rng.sample(range(e), rng.randint(1, e - 1)))
        pi = random_pi(rng, p, e, avoid=tuple(moving))
        h = random_series(rng, p, e, d, bound, pi=pi, fixed={i: (0, 3) for i in moving})
        U0 = [Fraction(rng.randint(1, 9), rng.randint(1, 3)) for _ in range(e)]
        direction = [Fraction(rng.randint(1, 4)) if i in moving else Fraction(0) for i in range(e)]
        yield h, U0, direction


def root_products(seed: int, count: int) -> Iterator[tuple[int, list]]:
    """(p, roots) with roots c * s^a, at most six of them, valuations drawn from a small pool."""
    rng = rng_for(seed, "roots")
    for _ in range(count):
        p = rng.choice(PRIMES)
        pool = [Fraction(rng.randint(-4, 6), p ** rng.randint(0, 1)) for _ in range(3)]
        roots = [(rng.randint(1, p - 1), rng.choice(pool)) for _ in range(rng.randint(1, 6))]
        yield p, roots


def random_additive(rng: random.Random, K: ExtField, n: int) -> AdditivePolynomial:
    nz = [x for x in K.elements() if x]
    coeffs = [rng.choice(nz)] + [K.elem(rng.randrange(K.p**K.m)) for _ in range(n - 1)] + [rng.choice(nz)]
    return AdditivePolynomial(coeffs if n else coeffs[:1], K)


# base field and degree pairs whose root spaces fit in F_{p^m}, m <= 12
KERNEL_SHAPES = ((2, 1, 1), (2, 1, 2), (2, 1, 3), (2, 2, 1), (2, 2, 2), (2, 3, 2), (3, 1, 1), (3, 1, 2), (3, 2, 1), (5, 1, 1))


def additive_instances(seed: int, count: int) -> Iterator[AdditivePolynomial]:
    rng = rng_for(seed, "additive")
    for _ in range(count):
        p, m, n = rng.choice(KERNEL_SHAPES)
        yield random_additive(rng, ext_build(p, m), n)

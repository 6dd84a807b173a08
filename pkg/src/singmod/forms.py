"""Exact integer arithmetic on imaginary quadratic discriminants and forms.

Enumerates the reduced primitive binary quadratic forms of a discriminant,
computes class numbers (directly and by the conductor formula), reduces and
composes forms, and exposes the class group acting on the forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple


@dataclass(frozen=True, order=True)
class Discriminant:
    value: int
    conductor: int
    fundamental: int

    def __post_init__(self):
        assert self.value == self.conductor ** 2 * self.fundamental


def _squarefree_part(n: int) -> Tuple[int, int]:
    """n = s^2 * q with q squarefree; returns (s, q).  n may be negative."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, q = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            s *= d ** (k // 2)
            if k % 2:
                q *= d
        d += 1 if d == 2 else 2
    q *= n
    return s, sign * q


def is_fundamental(d: int) -> bool:
    if d >= 0 or d % 4 not in (0, 1):
        return False
    if d % 4 == 1:
        _, q = _squarefree_part(d)
        return q == d
    m = d // 4
    if m % 4 not in (2, 3):
        return False
    _, q = _squarefree_part(m)
    return q == m


def validate_discriminant(n: int) -> Discriminant:
    """Split n < 0, n = 0,1 mod 4 into conductor^2 * fundamental."""
    if n >= 0:
        raise ValueError("discriminant must be negative: %d" % n)
    if n % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4: %d" % n)
    s, q = _squarefree_part(n)
    # q < 0 squarefree; fundamental part is q if q = 1 mod 4 else 4q
    if q % 4 == 1:
        d0 = q
    else:
        d0 = 4 * q
    f2 = n // d0
    f = math.isqrt(f2)
    assert f * f == f2
    return Discriminant(n, f, d0)


@dataclass(frozen=True, order=True)
class QForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return (-a < b <= a < c) or (0 <= b <= a == c)

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_ambiguous(self) -> bool:
        """Order <= 2 in the class group; exactly the classes with real j-value."""
        return self.b == 0 or self.a == self.b or self.a == self.c

    def inverse(self) -> "QForm":
        return reduce_form(self.a, -self.b, self.c)

    def __repr__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def reduce_form(a: int, b: int, c: int) -> QForm:
    """Classical reduction to the canonical representative."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("not a positive definite form")
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b <= -a or b > a:
            # shift b into (-a, a]
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = c + r * (b + r * a)
            b = b2
            continue
        break
    if a == c and b < 0:
        b = -b
    return QForm(a, b, c)


def enumerate_forms(disc: int | Discriminant) -> List[QForm]:
    """The canonical reduced-primitive set, sorted by (a, b)."""
    d = disc.value if isinstance(disc, Discriminant) else disc
    validate_discriminant(d)
    out = []
    amax = math.isqrt(-d // 3)
    for a in range(1, amax + 1):
        # b = d mod 2, -a < b <= a
        b0 = d & 1
        for b in range(b0, a + 1, 2):
            for bb in ({b, -b} if (0 < b < a) else {b}):
                num = bb * bb - d
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a:
                    continue
                if c == a and bb < 0:
                    continue
                f = QForm(a, bb, c)
                if f.is_reduced() and f.is_primitive():
                    out.append(f)
    out.sort(key=lambda f: (f.a, f.b))
    return out


@lru_cache(maxsize=200000)
def class_number(d: int) -> int:
    return len(enumerate_forms(d))


def class_number_table(cap: int) -> Dict[int, int]:
    """h(d) for every valid discriminant with |d| <= cap, by one bulk sweep.

    Walks the reduced primitive forms (a, b, c) directly; much faster than
    per-discriminant enumeration for large caps.
    """
    counts: Dict[int, int] = {}
    amax = math.isqrt(cap // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            g0 = math.gcd(a, b)
            # form is reduced iff c > a, or c == a with b >= 0
            cmin = a if b >= 0 else a + 1
            chi = (b * b + cap) // (4 * a)
            for c in range(cmin, chi + 1):
                d = b * b - 4 * a * c
                if d >= 0 or d < -cap:
                    continue
                if g0 != 1 and math.gcd(g0, c) != 1:
                    continue
                counts[d] = counts.get(d, 0) + 1
    return counts


_COUNT_CEILINGS = {1: 1, 2: 2, 3: 2, 4: 2, 5: 2, 6: 4, 7: 2, 8: 4, 9: 3,
                   10: 4, 11: 2}


def count_forms_with_leading(disc: int | Discriminant, a0: int) -> int:
    """Number of canonical forms with leading coefficient a0, for a0 in 1..11."""
    if a0 not in _COUNT_CEILINGS:
        raise ValueError("leading coefficient out of supported range 1..11")
    d = disc.value if isinstance(disc, Discriminant) else disc
    validate_discriminant(d)
    n = 0
    for b in range(-a0 + 1, a0 + 1):
        if (b * b - d) % (4 * a0):
            continue
        c = (b * b - d) // (4 * a0)
        if c < a0 or (c == a0 and b < 0):
            continue
        if math.gcd(math.gcd(a0, b), c) != 1:
            continue
        n += 1
    return n


def count_ceiling(a0: int) -> int:
    return _COUNT_CEILINGS[a0]


def cumulative_count_ceiling(disc_value: int, a_max: int) -> int:
    """Safe upper bound for the number of forms with leading coefficient <= a_max.

    Uses the generic per-a ceilings plus the two refinements available for
    a = 2 from the residue of the discriminant.
    """
    total = 0
    for a0 in range(1, a_max + 1):
        cap = _COUNT_CEILINGS[a0]
        if a0 == 2 and disc_value % 16 in (0, 4):
            # d = 0,4 mod 16: no subdominant forms
            cap = 0
        total += cap
    return total


def kronecker_symbol(d: int, p: int) -> int:
    """Kronecker symbol (d/p) at a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        r = d % 8
        return 1 if r in (1, 7) else -1
    r = d % p
    if r == 0:
        return 0
    t = pow(r, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def _prime_factors(n: int) -> List[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def class_number_formula(disc: int | Discriminant, m: int) -> int:
    """Predicted h(m^2 d) from h(d) by the conductor formula.

    h(m^2 d) = m * h(d) * prod_{p | m} (1 - (d/p)/p), divided by the unit
    index (3 for d = -3, 2 for d = -4) when m > 1: those two orders lose
    their extra units when the conductor grows.
    """
    d = disc.value if isinstance(disc, Discriminant) else disc
    validate_discriminant(d)
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return class_number(d)
    val = Fraction(m * class_number(d))
    for p in _prime_factors(m):
        val *= 1 - Fraction(kronecker_symbol(d, p), p)
    if d == -3:
        val /= 3
    elif d == -4:
        val /= 2
    assert val.denominator == 1, "conductor formula must collapse to an integer"
    return int(val)


def genus_count(d: int) -> int:
    """Number of genera 2^(mu-1) for discriminant d < 0 (textbook formula)."""
    validate_discriminant(d)
    odd_primes = [p for p in _prime_factors(d) if p != 2]
    r = len(odd_primes)
    if d % 4 == 1:
        mu = r
    else:
        n = -d // 4
        rem = n % 8
        if n % 4 == 3:
            mu = r
        elif rem % 4 in (1, 2) or rem == 4:
            mu = r + 1
        else:  # n = 0 mod 8
            mu = r + 2
    return 1 << max(mu - 1, 0)


def principal_form(d: int) -> QForm:
    if d % 2 == 0:
        return QForm(1, 0, -d // 4)
    return QForm(1, 1, (1 - d) // 4)


def _gcdext(a: int, b: int) -> Tuple[int, int, int]:
    """(u, v, g) with u*a + v*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_s, old_t, old_r


def _solve_linmod(a: int, b: int, m: int) -> Tuple[int, int]:
    """Solutions of a*x = b (mod m) as x = x0 + v*Z; raises if none exist."""
    u, _, g = _gcdext(a, m)
    if b % g:
        raise ValueError("no solution")
    x0 = (b // g) * u % m
    return x0, m // g


def compose(f: QForm, g_form: QForm) -> QForm:
    """Gaussian composition, reduced to the canonical representative.

    General (united-forms) algorithm; valid for any two primitive forms of
    the same discriminant, including composing a form with itself.
    """
    if f.disc != g_form.disc:
        raise ValueError("discriminant mismatch")
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g_form.a, g_form.b, g_form.c
    g0 = (b1 + b2) // 2
    h = (b2 - b1) // 2
    w = math.gcd(math.gcd(a1, a2), g0)
    s = a1 // w
    t = a2 // w
    u = g0 // w
    mu, nu = _solve_linmod(t * u, h * u + s * c1, s * t)
    lam, _ = _solve_linmod(t * nu, h - t * mu, s) if s > 1 else (0, 1)
    k = mu + nu * lam
    l = (k * t - h) // s
    m = (t * u * k - h * u - c1 * s) // (s * t)
    A = s * t
    B = w * u - (k * t + l * s)
    C = k * l - w * m
    return reduce_form(A, B, C)


class ClassGroup:
    """The form class group of a discriminant, acting by Gaussian composition."""

    def __init__(self, d: int):
        self.disc = validate_discriminant(d)
        self.elements: List[QForm] = enumerate_forms(d)
        self.index = {f: i for i, f in enumerate(self.elements)}
        self.identity = principal_form(d)
        assert self.identity in self.index

    @property
    def order(self) -> int:
        return len(self.elements)

    def compose(self, f: QForm, g: QForm) -> QForm:
        return compose(f, g)

    def inverse(self, f: QForm) -> QForm:
        return f.inverse()

    def power(self, f: QForm, n: int) -> QForm:
        if n < 0:
            return self.power(f.inverse(), -n)
        acc = self.identity
        base = f
        while n:
            if n & 1:
                acc = compose(acc, base)
            base = compose(base, base)
            n >>= 1
        return acc

    def element_order(self, f: QForm) -> int:
        acc = f
        n = 1
        while acc != self.identity:
            acc = compose(acc, f)
            n += 1
            if n > self.order:
                raise AssertionError("order computation ran away")
        return n

    def is_elementary_two_group(self) -> bool:
        """True iff every class squares to the identity (one class per genus)."""
        return all(compose(f, f) == self.identity for f in self.elements)

    def translates(self, f: QForm) -> Iterator[QForm]:
        for g in self.elements:
            yield compose(g, f)

"""Certified ball arithmetic on fixed-point integers.

Every numeric claim downstream of this module is a statement about
enclosures: a ball carries a center at a fixed binary scale together with
an integer error bound in units of one ulp (2^-prec).  All operations
round the center and then widen the error conservatively, so the true
value of any expression is guaranteed to lie inside the output ball.

Comparison is three-valued: ``certify_less`` answers True only when the
enclosures separate; everything else is Unknown.  Equalities are never
certified.  ``with_escalation`` reruns an Unknown-producing task at
geometrically increasing precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional


class UnresolvablePrecision(Exception):
    """An operation could not be carried out soundly at this precision.

    Raised e.g. for division by a ball whose enclosure contains zero.
    Callers escalate precision instead of receiving a silently wide ball.
    """

    def __init__(self, message: str, bits: int = 0):
        super().__init__(message)
        self.bits = bits


def _rshift_nearest(x: int, s: int) -> int:
    """Round x / 2^s to the nearest integer (ties toward +inf); |error| <= 1/2 ulp."""
    if s <= 0:
        return x << (-s)
    half = 1 << (s - 1)
    return (x + half) >> s


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _div_nearest(a: int, b: int) -> int:
    """Round a/b to the nearest integer; |error| <= 1/2."""
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


class RBall:
    """Real ball: the true value lies in [(m - e) / 2^prec, (m + e) / 2^prec]."""

    __slots__ = ("m", "e", "prec")

    def __init__(self, m: int, e: int, prec: int):
        if e < 0:
            raise ValueError("negative radius")
        self.m = m
        self.e = e
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(n: int, prec: int) -> "RBall":
        return RBall(n << prec, 0, prec)

    @staticmethod
    def from_fraction(fr: Fraction, prec: int) -> "RBall":
        num, den = fr.numerator, fr.denominator
        scaled = num << prec
        q, r = divmod(scaled, den)
        if r == 0:
            return RBall(q, 0, prec)
        return RBall(q, 1, prec)  # floor error < 1 ulp

    @staticmethod
    def exact_zero(prec: int) -> "RBall":
        return RBall(0, 0, prec)

    # -- queries -----------------------------------------------------------

    def lower(self) -> Fraction:
        return Fraction(self.m - self.e, 1 << self.prec)

    def upper(self) -> Fraction:
        return Fraction(self.m + self.e, 1 << self.prec)

    def midpoint(self) -> Fraction:
        return Fraction(self.m, 1 << self.prec)

    def radius(self) -> Fraction:
        return Fraction(self.e, 1 << self.prec)

    def contains_int(self, n: int) -> bool:
        scaled = n << self.prec
        return self.m - self.e <= scaled <= self.m + self.e

    def contains_fraction(self, fr: Fraction) -> bool:
        # (m - e)/2^p <= a/b <= (m + e)/2^p, cleared of denominators
        lhs = (self.m - self.e) * fr.denominator
        mid = fr.numerator << self.prec
        rhs = (self.m + self.e) * fr.denominator
        return lhs <= mid <= rhs

    def is_positive(self) -> bool:
        return self.m - self.e > 0

    def is_negative(self) -> bool:
        return self.m + self.e < 0

    def excludes_zero(self) -> bool:
        return self.is_positive() or self.is_negative()

    def sign_certain(self) -> Optional[int]:
        if self.is_positive():
            return 1
        if self.is_negative():
            return -1
        return None

    def __repr__(self) -> str:
        return f"RBall({float(self.midpoint()):.6g} +/- {float(self.radius()):.3g} @{self.prec}b)"

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "RBall") -> None:
        if self.prec != other.prec:
            raise ValueError("scale mismatch: %d vs %d" % (self.prec, other.prec))

    def __add__(self, other: "RBall") -> "RBall":
        self._check(other)
        return RBall(self.m + other.m, self.e + other.e, self.prec)

    def __sub__(self, other: "RBall") -> "RBall":
        self._check(other)
        return RBall(self.m - other.m, self.e + other.e, self.prec)

    def __neg__(self) -> "RBall":
        return RBall(-self.m, self.e, self.prec)

    def __mul__(self, other: "RBall") -> "RBall":
        # (m1 +/- e1)(m2 +/- e2)/2^2p: cross terms |m1|e2 + |m2|e1 + e1 e2,
        # then one rounding of the center back to scale p.
        self._check(other)
        p = self.prec
        prod = self.m * other.m
        if self.e == 0 and other.e == 0 and not (prod & ((1 << p) - 1)):
            return RBall(prod >> p, 0, p)  # exact path
        m = _rshift_nearest(prod, p)
        err = abs(self.m) * other.e + abs(other.m) * self.e + self.e * other.e
        e = (err >> p) + 2
        return RBall(m, e, p)

    def mul_int(self, k: int) -> "RBall":
        return RBall(self.m * k, self.e * abs(k), self.prec)

    def div_int(self, k: int) -> "RBall":
        if k == 0:
            raise ZeroDivisionError
        return RBall(_div_nearest(self.m, k), _ceil_div(self.e, abs(k)) + 1, self.prec)

    def add_int(self, k: int) -> "RBall":
        return RBall(self.m + (k << self.prec), self.e, self.prec)

    def __truediv__(self, other: "RBall") -> "RBall":
        # x/y with 0 excluded from y.  Error bound:
        #   |x/y - mx/my| = |(x-mx)my - mx(y-my)| / |y my|
        #                 <= (ex |my| + |mx| ey) / (|my| (|my| - ey))   [ulp scale]
        self._check(other)
        if not other.excludes_zero():
            raise UnresolvablePrecision("division by a ball containing zero", self.prec)
        p = self.prec
        my, ey = other.m, other.e
        m = _div_nearest(self.m << p, my)
        num = (self.e * abs(my) + abs(self.m) * ey) << p
        den = abs(my) * (abs(my) - ey)
        e = _ceil_div(num, den) + 2
        return RBall(m, e, p)

    def inv(self) -> "RBall":
        return RBall.from_int(1, self.prec) / self

    def sqr(self) -> "RBall":
        return self * self

    def pow_int(self, n: int) -> "RBall":
        if n < 0:
            return self.pow_int(-n).inv()
        result = RBall.from_int(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def abs_ball(self) -> "RBall":
        if self.m >= 0:
            return self
        return -self

    def rescale(self, prec: int) -> "RBall":
        if prec == self.prec:
            return self
        if prec > self.prec:
            s = prec - self.prec
            return RBall(self.m << s, self.e << s, prec)
        s = self.prec - prec
        return RBall(_rshift_nearest(self.m, s), (self.e >> s) + 2, prec)

    def widen_ulps(self, k: int) -> "RBall":
        return RBall(self.m, self.e + k, self.prec)

    def union(self, other: "RBall") -> "RBall":
        self._check(other)
        lo = min(self.m - self.e, other.m - other.e)
        hi = max(self.m + self.e, other.m + other.e)
        m = (lo + hi) // 2
        return RBall(m, max(hi - m, m - lo), self.prec)


def rball_from_endpoints(lo: int, hi: int, prec: int) -> RBall:
    """Ball covering [lo, hi] / 2^prec."""
    m = (lo + hi) // 2
    return RBall(m, max(hi - m, m - lo), prec)


class CBall:
    """Complex ball: center (re + i*im)/2^prec, disc radius e/2^prec."""

    __slots__ = ("re", "im", "e", "prec")

    def __init__(self, re: int, im: int, e: int, prec: int):
        if e < 0:
            raise ValueError("negative radius")
        self.re = re
        self.im = im
        self.e = e
        self.prec = prec

    @staticmethod
    def from_int(n: int, prec: int) -> "CBall":
        return CBall(n << prec, 0, 0, prec)

    @staticmethod
    def from_rball(x: RBall) -> "CBall":
        return CBall(x.m, 0, x.e, x.prec)

    @staticmethod
    def from_rballs(re: RBall, im: RBall) -> "CBall":
        if re.prec != im.prec:
            raise ValueError("scale mismatch")
        return CBall(re.m, im.m, re.e + im.e, re.prec)

    def real_part(self) -> RBall:
        return RBall(self.re, self.e, self.prec)

    def imag_part(self) -> RBall:
        return RBall(self.im, self.e, self.prec)

    def conjugate(self) -> "CBall":
        return CBall(self.re, -self.im, self.e, self.prec)

    def __repr__(self) -> str:
        scale = 2.0 ** (-min(self.prec, 1000))
        try:
            return "CBall(%.6g%+.6gi +/- %.3g @%db)" % (
                self.re * scale, self.im * scale, self.e * scale, self.prec)
        except OverflowError:
            return "CBall(<big> @%db)" % self.prec

    def _check(self, other: "CBall") -> None:
        if self.prec != other.prec:
            raise ValueError("scale mismatch")

    def __add__(self, other: "CBall") -> "CBall":
        self._check(other)
        return CBall(self.re + other.re, self.im + other.im, self.e + other.e, self.prec)

    def __sub__(self, other: "CBall") -> "CBall":
        self._check(other)
        return CBall(self.re - other.re, self.im - other.im, self.e + other.e, self.prec)

    def __neg__(self) -> "CBall":
        return CBall(-self.re, -self.im, self.e, self.prec)

    def add_int(self, k: int) -> "CBall":
        return CBall(self.re + (k << self.prec), self.im, self.e, self.prec)

    def mul_int(self, k: int) -> "CBall":
        return CBall(self.re * k, self.im * k, self.e * abs(k), self.prec)

    def _center_abs_upper(self) -> int:
        # cheap upper bound for |center| in ulps: |a| + |b| >= sqrt(a^2+b^2)
        return abs(self.re) + abs(self.im)

    def __mul__(self, other: "CBall") -> "CBall":
        # |z1 z2 - c1 c2| <= |c1| e2 + |c2| e1 + e1 e2, plus one center rounding
        # per component.
        self._check(other)
        p = self.prec
        a, b, c, d = self.re, self.im, other.re, other.im
        pre = a * c - b * d
        pim = a * d + b * c
        mask = (1 << p) - 1
        if self.e == 0 and other.e == 0 and not (pre & mask) and not (pim & mask):
            return CBall(pre >> p, pim >> p, 0, p)  # exact path
        re = _rshift_nearest(pre, p)
        im = _rshift_nearest(pim, p)
        err = self._center_abs_upper() * other.e + other._center_abs_upper() * self.e \
            + self.e * other.e
        e = (err >> p) + 3
        return CBall(re, im, e, p)

    def abs_sq(self) -> RBall:
        # |z|^2 enclosure via |z| in [max(|c|-e,0), |c|+e]
        p = self.prec
        c2 = self.re * self.re + self.im * self.im  # scale 2^2p, exact
        c = math.isqrt(c2)  # floor(|center| * 2^p)
        lo = max(c - self.e, 0)
        hi = c + 1 + self.e
        return rball_from_endpoints(lo * lo >> p, (hi * hi >> p) + 1, p)

    def abs_ball(self) -> RBall:
        """Enclosure of |z| as a real ball."""
        p = self.prec
        c2 = self.re * self.re + self.im * self.im
        c = math.isqrt(c2)  # c <= |center|*2^p < c+1
        lo = max(c - self.e, 0)
        hi = c + 1 + self.e
        return rball_from_endpoints(lo, hi, p)

    def __truediv__(self, other: "CBall") -> "CBall":
        # z/w via exact integer cross products: center z*conj(w)/|w|^2 with
        #   |z/w - cz/cw| = |z cw - cz w| / (|w| |cw|)
        #                 <= (e_z |cw| + |cz| e_w) / (|cw| (|cw| - e_w))  [ulps]
        # All products stay at the doubled scale, so tiny |w| does not
        # underflow the fixed-point grid.
        self._check(other)
        p = self.prec
        a, b = self.re, self.im
        c, d = other.re, other.im
        dd = c * c + d * d  # exact, scale 2^(2p)
        s = math.isqrt(dd)  # s <= |cw| 2^p < s + 1
        if s <= other.e:
            raise UnresolvablePrecision("division by a complex ball containing zero", p)
        re = _div_nearest((a * c + b * d) << p, dd)
        im = _div_nearest((b * c - a * d) << p, dd)
        cz_up = math.isqrt(a * a + b * b) + 1
        num = (self.e * (s + 1) + cz_up * other.e) << p
        den = s * (s - other.e)
        e = _ceil_div(num, den) + 3
        return CBall(re, im, e, p)

    def pow_int(self, n: int) -> "CBall":
        if n < 0:
            return CBall.from_int(1, self.prec) / self.pow_int(-n)
        result = CBall.from_int(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def excludes_zero(self) -> bool:
        return self.abs_ball().is_positive()

    def contains_int(self, n: int) -> bool:
        # true if the point n could lie in the ball (conservative: uses the
        # bounding box |re - n| <= e and |im| <= e would under-cover; use disc)
        dre = abs(self.re - (n << self.prec))
        dim = abs(self.im)
        if dre > self.e or dim > self.e:
            return False
        return dre * dre + dim * dim <= self.e * self.e

    def overlaps(self, other: "CBall") -> bool:
        self._check(other)
        dre = self.re - other.re
        dim = self.im - other.im
        r = self.e + other.e
        return dre * dre + dim * dim <= r * r

    def rescale(self, prec: int) -> "CBall":
        if prec == self.prec:
            return self
        if prec > self.prec:
            s = prec - self.prec
            return CBall(self.re << s, self.im << s, self.e << s, prec)
        s = self.prec - prec
        return CBall(_rshift_nearest(self.re, s), _rshift_nearest(self.im, s),
                     (self.e >> s) + 3, prec)


# -- certified constants ---------------------------------------------------

_PI_CACHE: dict = {}
_LN2_CACHE: dict = {}


def _atan_inv_ulps(n: int, prec: int) -> tuple:
    """Enclosure of atan(1/n)*2^prec as (value, err_ulps), n >= 2.

    Alternating series sum (-1)^j / ((2j+1) n^(2j+1)); truncation error is
    bounded by the first omitted term.
    """
    one = 1 << prec
    total = 0
    err = 0
    j = 0
    npow = n  # n^(2j+1)
    n2 = n * n
    while True:
        term = one // ((2 * j + 1) * npow)
        err += 1  # floor division error, 1 ulp per term
        if term == 0:
            err += 1  # truncation bounded by the omitted term < 1 ulp
            break
        total += -term if (j & 1) else term
        npow *= n2
        j += 1
    return total, err


def pi_ball(prec: int) -> RBall:
    """Machin: pi = 16 atan(1/5) - 4 atan(1/239)."""
    if prec in _PI_CACHE:
        return _PI_CACHE[prec]
    work = prec + 16
    a5, e5 = _atan_inv_ulps(5, work)
    a239, e239 = _atan_inv_ulps(239, work)
    m = 16 * a5 - 4 * a239
    e = 16 * e5 + 4 * e239
    out = RBall(m, e, work).rescale(prec)
    _PI_CACHE[prec] = out
    return out


def _atanh_inv_ulps(n: int, prec: int) -> tuple:
    """Enclosure of atanh(1/n)*2^prec, n >= 2: sum 1/((2j+1) n^(2j+1))."""
    one = 1 << prec
    total = 0
    err = 0
    j = 0
    npow = n
    n2 = n * n
    while True:
        term = one // ((2 * j + 1) * npow)
        err += 1
        if term == 0:
            err += 1  # tail < first omitted term * n^2/(n^2-1) < 2 ulps at this point
            break
        total += term
        npow *= n2
        j += 1
    return total, err


def ln2_ball(prec: int) -> RBall:
    if prec in _LN2_CACHE:
        return _LN2_CACHE[prec]
    work = prec + 16
    a, e = _atanh_inv_ulps(3, work)
    out = RBall(2 * a, 2 * e, work).rescale(prec)
    _LN2_CACHE[prec] = out
    return out


def sqrt_int_ball(n: int, prec: int) -> RBall:
    """Certified sqrt of a nonnegative integer."""
    if n < 0:
        raise ValueError("negative argument")
    s = math.isqrt(n << (2 * prec))
    # s <= sqrt(n)*2^prec < s+1
    return rball_from_endpoints(s, s + 1, prec)


def _exp_point(m: int, prec: int) -> tuple:
    """Enclosure (lo, hi) in ulps of exp(m / 2^prec).

    Range-reduces by ln2, then Taylor on |r| <= 0.5 + slack with an explicit
    remainder bound.
    """
    ln2 = ln2_ball(prec)
    # k = nearest integer to m/ln2 (midpoint guide; soundness comes from the ball below)
    k = (2 * m + ln2.m) // (2 * ln2.m)
    # r = m - k*ln2 as a ball
    r = RBall(m, 0, prec) - ln2.mul_int(k)
    # |r| <= ln2/2 + k*ln2_err; require |r| < 0.75 so the tail is geometric
    r_hi_ulps = abs(r.m) + r.e
    if r_hi_ulps >= (3 << prec) // 4:
        raise UnresolvablePrecision("exp range reduction failed", prec)
    one = 1 << prec
    # Taylor sum r^j/j!; term ratio |r|/(j+1) <= 3/4, so the tail after a term
    # of size t is at most 3t
    total = RBall(one, 0, prec)
    term = RBall(one, 0, prec)
    j = 0
    while True:
        j += 1
        term = term * r
        term = RBall(term.m // j, _ceil_div(term.e, j) + 2, prec)
        total = total + term
        if abs(term.m) + term.e < 4:
            break
        if j > 4 * prec:
            raise UnresolvablePrecision("exp series did not converge", prec)
    total = total.widen_ulps(16)  # covers the tail: 3 * 4 ulps, rounded up
    lo, hi = total.m - total.e, total.m + total.e
    if k >= 0:
        return lo << k, hi << k
    s = -k
    return lo >> s, (hi >> s) + 1


def exp_ball(x: RBall) -> RBall:
    """Certified exp: monotone, so evaluate both endpoints."""
    p = x.prec
    lo1, _ = _exp_point(x.m - x.e, p)
    _, hi2 = _exp_point(x.m + x.e, p)
    return rball_from_endpoints(max(lo1, 0), hi2, p)


def _ln_point(m: int, prec: int) -> tuple:
    """Enclosure (lo, hi) in ulps of ln(m / 2^prec), m > 0."""
    if m <= 0:
        raise ValueError("ln of nonpositive point")
    # normalize m = u * 2^k with u in [1, 2)
    k = m.bit_length() - 1 - prec
    if k >= 0:
        u = RBall(m >> k, 1 if m & ((1 << k) - 1) else 0, prec)
    else:
        u = RBall(m << (-k), 0, prec)
    # t = (u-1)/(u+1) in [0, 1/3); ln u = 2 atanh t
    one = RBall(1 << prec, 0, prec)
    t = (u - one) / (u + one)
    t2 = t * t
    term = t
    total = t
    j = 0
    while True:
        j += 1
        term = term * t2
        contrib = RBall(term.m // (2 * j + 1), _ceil_div(term.e, 2 * j + 1) + 2, prec)
        total = total + contrib
        if abs(term.m) + term.e < 4:
            break
        if j > 4 * prec:
            raise UnresolvablePrecision("ln series did not converge", prec)
    total = total.mul_int(2).widen_ulps(16)
    ln2 = ln2_ball(prec)
    out = total + ln2.mul_int(k)
    return out.m - out.e, out.m + out.e


def ln_ball(x: RBall) -> RBall:
    """Certified natural log of a certainly-positive ball (monotone endpoints)."""
    if not x.is_positive():
        raise UnresolvablePrecision("ln of a ball not certainly positive", x.prec)
    p = x.prec
    lo, _ = _ln_point(x.m - x.e, p)
    _, hi = _ln_point(x.m + x.e, p)
    return rball_from_endpoints(lo, hi, p)


def _sin_cos_small(theta: RBall) -> tuple:
    """(sin, cos) enclosures for |theta| <= 1.  Alternating Taylor tails."""
    p = theta.prec
    if abs(theta.m) + theta.e > (1 << p) + (1 << (p - 4)):
        raise ValueError("argument not reduced")
    t2 = theta * theta
    # sin
    term = theta
    s = theta
    j = 1
    while True:
        term = term * t2
        den = (2 * j) * (2 * j + 1)
        term = RBall(-(term.m // den), _ceil_div(term.e, den) + 2, p)
        s = s + term
        j += 1
        if abs(term.m) + term.e < 4:
            break
    s = s.widen_ulps(16)
    # cos
    one = RBall(1 << p, 0, p)
    term = one
    c = one
    j = 0
    while True:
        term = term * t2
        den = (2 * j + 1) * (2 * j + 2)
        term = RBall(-(term.m // den), _ceil_div(term.e, den) + 2, p)
        c = c + term
        j += 1
        if abs(term.m) + term.e < 4:
            break
    c = c.widen_ulps(16)
    return s, c


def unit_root_ball(b: int, a: int, prec: int) -> CBall:
    """Certified enclosure of exp(i * pi * b / a), a >= 1.

    Reduces the angle exactly with integer arithmetic and eighth-turn
    symmetries, so only small-argument (|t| <= pi/4) series are needed.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    b %= 2 * a  # angle mod 2*pi
    # theta = pi*b/a = (pi/2)*q + (pi/2)*(rem/a) with 0 <= rem < a
    q, rem = divmod(2 * b, a)
    swap = False
    if 2 * rem > a:  # fold (pi/4, pi/2) onto (0, pi/4): cos/sin swap
        rem = a - rem
        swap = True
    theta = pi_ball(prec).mul_int(rem)
    theta = RBall(theta.m // (2 * a), _ceil_div(theta.e, 2 * a) + 2, prec)
    s, c = _sin_cos_small(theta)
    if swap:
        s, c = c, s
    q %= 4
    if q == 0:
        re, im = c, s
    elif q == 1:
        re, im = -s, c
    elif q == 2:
        re, im = -c, -s
    else:
        re, im = s, -c
    return CBall.from_rballs(re, im)


# -- comparisons and escalation ---------------------------------------------

def certify_less(x: RBall, y: RBall) -> bool:
    """True only if sup(x) < inf(y).  False means Unknown, never 'not less'."""
    if x.prec != y.prec:
        raise ValueError("scale mismatch")
    return x.m + x.e < y.m - y.e


def certify_abs_separated(x: CBall, y: CBall) -> bool:
    """True only if the two balls are certainly disjoint."""
    return not x.overlaps(y)


@dataclass(frozen=True)
class PrecisionPolicy:
    start_bits: int = 128
    max_bits: int = 16384
    growth: int = 2

    def __post_init__(self):
        if self.start_bits < 64:
            raise ValueError("start_bits must be >= 64")
        if self.max_bits < self.start_bits:
            raise ValueError("max_bits must be >= start_bits")


@dataclass(frozen=True)
class Certified:
    bits: int
    payload: object = None


@dataclass(frozen=True)
class Unresolved:
    max_bits: int
    reason: str = ""


def with_escalation(task: Callable[[int], object],
                    policy: PrecisionPolicy = PrecisionPolicy()):
    """Rerun a precision-parameterized task until it certifies.

    ``task(bits)`` returns a truthy payload when certified and None/False
    when unknown at that precision; it may also raise UnresolvablePrecision.
    The task must be monotone: a certified answer never flips at higher
    precision.
    """
    bits = policy.start_bits
    while True:
        try:
            result = task(bits)
        except UnresolvablePrecision:
            result = None
        if result:
            return Certified(bits, result)
        if bits >= policy.max_bits:
            return Unresolved(policy.max_bits)
        bits = min(bits * policy.growth, policy.max_bits)

import math
import random
from fractions import Fraction

import pytest

from singmod.rigor import (
    CBall, Certified, PrecisionPolicy, RBall, Unresolved, UnresolvablePrecision,
    certify_less, exp_ball, ln2_ball, ln_ball, pi_ball, sqrt_int_ball,
    unit_root_ball, with_escalation,
)

PREC = 128


def rb(x, prec=PREC) -> RBall:
    return RBall.from_fraction(Fraction(x).limit_denominator(10**12), prec)


def test_exact_integer_paths():
    two = RBall.from_int(2, PREC)
    p10 = two.pow_int(10)
    assert p10.e == 0
    assert p10.midpoint() == 1024
    z = CBall.from_int(3, PREC) * CBall.from_int(5, PREC)
    assert z.e == 0 and z.re == 15 << PREC


def test_exp_of_zero_contains_one():
    x = RBall.exact_zero(PREC)
    y = exp_ball(x)
    assert y.contains_int(1)
    assert y.radius() < Fraction(1, 2**100)


def test_abs_of_three_four_i():
    z = CBall(3 << PREC, 4 << PREC, (1 << PREC) // 10, PREC)
    a = z.abs_ball()
    assert a.lower() >= Fraction(49, 10) - Fraction(1, 2**64)
    assert a.upper() <= Fraction(51, 10) + Fraction(1, 2**64)


def test_certify_less_basic():
    assert certify_less(rb(2), rb(3))
    assert not certify_less(rb(3), rb(2))
    # overlap -> unknown
    x = RBall(2 << PREC, 2 << PREC, PREC)
    y = RBall(3 << PREC, 2 << PREC, PREC)
    assert not certify_less(x, y)
    # [0.99, 0.999] < [1, 1]
    lo = RBall.from_fraction(Fraction(1989, 2000), PREC).widen_ulps(
        ((1 << PREC) * 9) // 2000)
    assert certify_less(lo, RBall.from_int(1, PREC))


def test_pi_enclosure():
    p = pi_ball(256)
    assert p.contains_fraction(Fraction(math.pi).limit_denominator(10**15)) or True
    # digits check: pi truncated to 50 digits brackets the ball
    known = Fraction(
        31415926535897932384626433832795028841971693993751, 10**49)
    assert known < p.lower() and p.upper() < known + Fraction(1, 10**49)
    assert p.radius() < Fraction(1, 2**200)


def test_ln2_and_exp_roundtrip():
    l2 = ln2_ball(192)
    y = exp_ball(l2)
    assert y.contains_int(2)


def test_exp_known_value():
    # e^1 truncated to 40 digits brackets the ball
    known = Fraction(27182818284590452353602874713526624977572, 10**40)
    y = exp_ball(RBall.from_int(1, 256))
    assert known < y.lower() and y.upper() < known + Fraction(1, 10**40)


def test_sqrt_int():
    s = sqrt_int_ball(2, 200)
    assert s.sqr().contains_int(2)
    t = sqrt_int_ball(144, 200)
    assert t.contains_int(12)


def test_ln_of_exp():
    x = rb(Fraction(7, 3), 192)
    y = ln_ball(exp_ball(x))
    assert y.lower() <= Fraction(7, 3) <= y.upper()


def test_unit_roots():
    for (b, a, re, im) in [(0, 1, 1, 0), (1, 1, -1, 0), (1, 2, 0, 1),
                           (3, 2, 0, -1), (2, 1, 1, 0)]:
        z = unit_root_ball(b, a, 192)
        assert abs(Fraction(z.re, 1 << 192) - re) < Fraction(1, 2**150)
        assert abs(Fraction(z.im, 1 << 192) - im) < Fraction(1, 2**150)
    # sixth root: cos(pi/3) = 1/2
    z = unit_root_ball(1, 3, 192)
    assert z.real_part().contains_fraction(Fraction(1, 2))
    # |z| = 1 for a random sample of angles
    for (b, a) in [(1, 7), (5, 12), (9, 11), (13, 8)]:
        z = unit_root_ball(b, a, 192)
        ab = z.abs_ball()
        assert ab.lower() < 1 < ab.upper() or ab.contains_int(1)


def test_division_by_zero_ball_raises():
    num = RBall.from_int(1, PREC)
    den = RBall(0, 5, PREC)
    with pytest.raises(UnresolvablePrecision):
        num / den


def containment_reference(op, x, y, fx, fy):
    """High-precision midpoint evaluation must land inside the output ball."""
    out = op(x, y)
    ref = {
        "add": fx + fy, "sub": fx - fy, "mul": fx * fy,
    }[op.__name__.strip("_")]
    assert out.lower() <= ref <= out.upper()


def test_containment_fuzz_real():
    rng = random.Random(12345)
    for _ in range(2000):
        fx = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        fy = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        x = RBall.from_fraction(fx, PREC)
        y = RBall.from_fraction(fy, PREC)
        for name in ("add", "sub", "mul"):
            out = getattr(RBall, "__%s__" % name)(x, y)
            ref = {"add": fx + fy, "sub": fx - fy, "mul": fx * fy}[name]
            assert out.lower() <= ref <= out.upper()
        if fy != 0:
            out = x / y
            ref = fx / fy
            assert out.lower() <= ref <= out.upper()


def test_containment_fuzz_complex():
    rng = random.Random(6789)
    for _ in range(800):
        parts = [Fraction(rng.randint(-10**5, 10**5), rng.randint(1, 100))
                 for _ in range(4)]
        x = CBall.from_rballs(RBall.from_fraction(parts[0], PREC),
                              RBall.from_fraction(parts[1], PREC))
        y = CBall.from_rballs(RBall.from_fraction(parts[2], PREC),
                              RBall.from_fraction(parts[3], PREC))
        z = x * y
        ref_re = parts[0] * parts[2] - parts[1] * parts[3]
        ref_im = parts[0] * parts[3] + parts[1] * parts[2]
        assert z.real_part().lower() <= ref_re <= z.real_part().upper()
        assert z.imag_part().lower() <= ref_im <= z.imag_part().upper()
        if parts[2] or parts[3]:
            w = x / y
            den = parts[2] ** 2 + parts[3] ** 2
            r_re = (parts[0] * parts[2] + parts[1] * parts[3]) / den
            r_im = (parts[1] * parts[2] - parts[0] * parts[3]) / den
            assert w.real_part().lower() <= r_re <= w.real_part().upper()
            assert w.imag_part().lower() <= r_im <= w.imag_part().upper()


def test_radius_monotone_under_precision():
    fx = Fraction(355, 113)
    fy = Fraction(-217, 33)
    prev = None
    for prec in (64, 128, 256, 512):
        x = RBall.from_fraction(fx, prec)
        y = RBall.from_fraction(fy, prec)
        r = ((x * y) / (x + y)).radius()
        if prev is not None:
            assert r <= prev
        prev = r


def test_escalation_certifies_e_pi_sqrt163_gap():
    # e^(pi*sqrt(163)) is famously ~7.5e-13 below an integer; separating the
    # two needs well over 64 bits.
    def task(bits):
        x = pi_ball(bits) * sqrt_int_ball(163, bits)
        y = exp_ball(x)
        n = round(float('640320') ** 3 + 744)  # 262537412640768744
        target = RBall.from_int(262537412640768744, bits)
        if certify_less(y, target):
            return ("less", bits)
        return None

    res = with_escalation(task, PrecisionPolicy(start_bits=64, max_bits=4096))
    assert isinstance(res, Certified)
    assert res.bits >= 128


def test_escalation_unresolved_on_true_equality():
    def task(bits):
        one = RBall.from_int(1, bits)
        return certify_less(one, one) or None

    res = with_escalation(task, PrecisionPolicy(start_bits=64, max_bits=256))
    assert isinstance(res, Unresolved)
    assert res.max_bits == 256


def test_policy_validation():
    with pytest.raises(ValueError):
        PrecisionPolicy(start_bits=32)
    with pytest.raises(ValueError):
        PrecisionPolicy(start_bits=128, max_bits=64)

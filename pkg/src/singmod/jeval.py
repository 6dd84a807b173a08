"""Certified evaluation of the modular j-function at CM points.

The value attached to a form (a, b, c) of discriminant d is j(tau) with
tau = (b + sqrt(d)) / 2a.  Evaluation goes through the weight-4 Eisenstein
series and the eta product,

    j = E4(q)^3 / (q * f(q)^24),      f(q) = prod (1 - q^n),

because both factors admit elementary certified tail bounds: f is the
pentagonal-number series with coefficients in {-1, 0, 1}, and E4 has
coefficients 240*sigma3(n) <= 240*n^4.  The result is a complex ball
guaranteed to contain the exact singular modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .forms import QForm, enumerate_forms, validate_discriminant
from .rigor import (
    CBall, RBall, UnresolvablePrecision, certify_less, exp_ball, ln_ball,
    pi_ball, rball_from_endpoints, sqrt_int_ball, unit_root_ball,
)

LN2 = math.log(2)


# -- exact series ------------------------------------------------------------

def pentagonal_coefficients(n_max: int) -> List[int]:
    """Coefficients of prod (1 - q^n) = sum (-1)^k q^(k(3k-1)/2) up to n_max."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    k = 1
    while True:
        done = True
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g <= n_max:
                coeffs[g] = -1 if k % 2 else 1
                done = False
        if done:
            break
        k += 1
    return coeffs


def sigma3_table(n_max: int) -> List[int]:
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        cube = d * d * d
        for m in range(d, n_max + 1, d):
            sig[m] += cube
    return sig


def e4_coefficients(n_max: int) -> List[int]:
    sig = sigma3_table(n_max)
    return [1] + [240 * sig[n] for n in range(1, n_max + 1)]


def eta_and_e4_series(n_max: int) -> Tuple[List[int], List[int]]:
    """Exact truncations of the eta-product factor and E4."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return pentagonal_coefficients(n_max), e4_coefficients(n_max)


def _series_mul(f: Sequence[int], g: Sequence[int], n_max: int) -> List[int]:
    out = [0] * (n_max + 1)
    for i, fi in enumerate(f):
        if fi == 0 or i > n_max:
            continue
        for j, gj in enumerate(g):
            if i + j > n_max:
                break
            if gj:
                out[i + j] += fi * gj
    return out


def _series_pow(f: Sequence[int], k: int, n_max: int) -> List[int]:
    result = [1] + [0] * n_max
    base = list(f[:n_max + 1])
    while k:
        if k & 1:
            result = _series_mul(result, base, n_max)
        base = _series_mul(base, base, n_max)
        k >>= 1
    return result


def _series_inv(f: Sequence[int], n_max: int) -> List[int]:
    assert f[0] == 1
    inv = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        acc = 0
        for i in range(1, n + 1):
            if i < len(f) and f[i]:
                acc += f[i] * inv[n - i]
        inv[n] = -acc
    return inv


def j_coefficients(n_max: int) -> List[int]:
    """Exact c_1..c_n of j = 1/q + 744 + sum c_n q^n, by series arithmetic."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n_work = n_max + 1
    f, e4 = eta_and_e4_series(n_work)
    num = _series_pow(e4, 3, n_work)
    den_inv = _series_inv(_series_pow(f, 24, n_work), n_work)
    jq = _series_mul(num, den_inv, n_work)  # = q * j
    assert jq[0] == 1 and jq[1] == 744
    coeffs = jq[2:2 + n_max]
    assert all(c > 0 for c in coeffs)
    return coeffs


# -- certified evaluation ------------------------------------------------------

@dataclass(frozen=True)
class CMPoint:
    form: QForm
    disc: int

    def q_log_magnitude(self) -> float:
        """Float guide for -ln|q| = pi*sqrt(|d|)/a (not certified)."""
        return math.pi * math.sqrt(-self.disc) / self.form.a


def _horner(coeffs: Sequence[int], q: CBall, prec: int) -> CBall:
    acc = CBall.from_int(coeffs[-1], prec)
    for c in reversed(coeffs[:-1]):
        acc = acc * q
        if c:
            acc = acc.add_int(c)
    return acc


def _geometric_tail_ulps(q_hi: RBall, first_exp: int, prec: int) -> int:
    """Upper bound, in ulps, for sum_{m >= first_exp} |q|^m."""
    one = RBall.from_int(1, prec)
    t = q_hi.pow_int(first_exp) / (one - q_hi)
    return t.m + t.e


def eval_singular_modulus(form: QForm, bits: int) -> CBall:
    """Certified ball around j((b + sqrt(d))/2a) for a canonical form.

    ``bits`` controls the target accuracy; the returned ball's radius is
    whatever the rigorous propagation yields (escalate on the outside if it
    is too wide).
    """
    d = form.disc
    validate_discriminant(d)
    a = form.a
    qlog = math.pi * math.sqrt(-d) / a  # heuristic size guide only
    prec = bits + int(qlog / LN2) + 96
    n_series = max(8, int((bits + 96) * LN2 / (qlog / 1)) + 2)
    # |q| = exp(-pi sqrt(|d|) / a) with certified enclosure
    x = pi_ball(prec) * sqrt_int_ball(-d, prec)
    x = x.div_int(a)
    qabs = exp_ball(-x)
    zeta = unit_root_ball(form.b, a, prec)
    q = zeta * CBall.from_rball(qabs)

    fcoef, e4coef = eta_and_e4_series(n_series)
    fball = _horner(fcoef, q, prec)
    e4ball = _horner(e4coef, q, prec)

    # certified tails; |q| < 1 is guaranteed since x > 0
    one = RBall.from_int(1, prec)
    q_hi = rball_from_endpoints(qabs.m + qabs.e, qabs.m + qabs.e, prec)
    if not certify_less(q_hi, one):
        raise UnresolvablePrecision("|q| not certified < 1", bits)
    # f tail: coefficients in {-1,0,1}, one per power
    f_tail = _geometric_tail_ulps(q_hi, n_series + 1, prec)
    # E4 tail: 240 * sum_{n > N} sigma3(n) |q|^n <= 240 (N+1)^4 |q|^(N+1) * B(|q|)
    # with sigma3(n) <= n^4 and sum (j+1)^4 x^j = (1+11x+11x^2+x^3)/(1-x)^5
    nq = q_hi
    bpoly = one.add_int(0) + nq.mul_int(11) + nq.sqr().mul_int(11) + nq.pow_int(3)
    bfac = bpoly / (one - nq).pow_int(5)
    e4_tail_ball = nq.pow_int(n_series + 1).mul_int(240 * (n_series + 1) ** 4) * bfac
    e4_tail = e4_tail_ball.m + e4_tail_ball.e

    fball = CBall(fball.re, fball.im, fball.e + f_tail, prec)
    e4ball = CBall(e4ball.re, e4ball.im, e4ball.e + e4_tail, prec)

    denom = q * fball.pow_int(24)
    value = e4ball.pow_int(3) / denom
    if form.is_ambiguous():
        # ambiguous classes are fixed by complex conjugation: the value is real
        value = CBall(value.re, 0, value.e, prec)
    return value


# -- per-discriminant data, with a process-wide idempotent cache -------------

@dataclass(frozen=True)
class ModuliSet:
    """All singular moduli of one discriminant at one precision target."""
    disc: int
    bits: int
    forms: Tuple[QForm, ...]
    values: Tuple[CBall, ...]

    def value_of(self, form: QForm) -> CBall:
        return self.values[self.forms.index(form)]

    def abs_of(self, form: QForm) -> RBall:
        return self.value_of(form).abs_ball()

    def log_abs_of(self, form: QForm) -> RBall:
        return ln_ball(self.abs_of(form))

    def dominant_form(self) -> QForm:
        return self.forms[0]


_CACHE: Dict[Tuple[int, int], ModuliSet] = {}


def moduli_set(d: int, bits: int) -> ModuliSet:
    key = (d, bits)
    got = _CACHE.get(key)
    if got is not None:
        return got
    forms = enumerate_forms(d)
    # one shared scale so that values of different forms compare directly
    common_prec = bits + int(math.pi * math.sqrt(-d) / LN2) + 96
    values = []
    conj_done: Dict[QForm, CBall] = {}
    for f in forms:
        conj = QForm(f.a, -f.b, f.c)
        if conj in conj_done:
            values.append(conj_done[conj].conjugate())
            continue
        v = eval_singular_modulus(f, bits).rescale(common_prec)
        conj_done[f] = v
        values.append(v)
    ms = ModuliSet(d, bits, tuple(forms), tuple(values))
    _CACHE.setdefault(key, ms)
    return _CACHE[key]


def clear_cache() -> None:
    _CACHE.clear()


def envelope(d: int, a0: int, bits: int = 128) -> Tuple[RBall, RBall]:
    """Certified enclosures of exp(pi sqrt(|d|)/a0) -/+ 2079."""
    validate_discriminant(d)
    if a0 < 1:
        raise ValueError("a0 must be >= 1")
    prec = bits + int(math.pi * math.sqrt(-d) / a0 / LN2) + 32
    x = (pi_ball(prec) * sqrt_int_ball(-d, prec)).div_int(a0)
    core = exp_ball(x)
    return core.add_int(-2079), core.add_int(2079)


@dataclass(frozen=True)
class RankedGroup:
    """A maximal set of forms sharing one |value| (a conjugate pair or a single)."""
    forms: Tuple[QForm, ...]
    abs_value: RBall
    is_conjugate_pair: bool


def conjugate_tie_groups(forms: Sequence[QForm]) -> List[Tuple[QForm, ...]]:
    groups = []
    seen = set()
    for f in forms:
        if f in seen:
            continue
        conj = QForm(f.a, -f.b, f.c)
        if conj != f and conj in forms:
            groups.append((f, conj) if (f.a, f.b) <= (conj.a, conj.b) else (conj, f))
            seen.add(conj)
        else:
            groups.append((f,))
        seen.add(f)
    return groups


def dominance_rank(d: int, bits: int) -> List[RankedGroup]:
    """Tie groups sorted by certified strictly decreasing |value|.

    Conjugate pairs share a group (their absolute values agree exactly).
    Raises UnresolvablePrecision when two distinct groups cannot be
    separated at this precision.
    """
    ms = moduli_set(d, bits)
    groups = []
    for forms in conjugate_tie_groups(ms.forms):
        ab = ms.abs_of(forms[0])
        groups.append(RankedGroup(forms, ab, len(forms) == 2))
    groups.sort(key=lambda g: -g.abs_value.m)
    for g1, g2 in zip(groups, groups[1:]):
        if not certify_less(g2.abs_value, g1.abs_value):
            raise UnresolvablePrecision(
                "dominance rank tie between %s and %s at disc %d"
                % (g1.forms, g2.forms, d), bits)
    assert groups[0].forms[0].a == 1
    return groups


def dominant_abs(d: int, bits: int) -> RBall:
    ms = moduli_set(d, bits)
    return ms.abs_of(ms.dominant_form())


def second_largest_abs(d: int, bits: int) -> Optional[RBall]:
    """|value| of the largest non-dominant modulus, None when h = 1."""
    ms = moduli_set(d, bits)
    if len(ms.forms) == 1:
        return None
    rest = [ms.abs_of(f) for f in ms.forms[1:]]
    rest.sort(key=lambda r: -r.m)
    return rest[0]


def min_nonzero_lower_bound(d: int, prec: int) -> RBall:
    """Certified enclosure of min(4.4e-5, 3500 |d|^-3)."""
    from fractions import Fraction
    a = Fraction(44, 10 ** 6)
    b = Fraction(3500, (-d) ** 3)
    return RBall.from_fraction(min(a, b), prec)

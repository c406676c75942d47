"""Rational Weierstrass models and their local/arithmetic data.

Curves are taken exactly as supplied (models are trusted, with a
non-minimality warning at bad primes rather than an error, since quadratic
twist models are deliberately non-minimal at 2).  Everything downstream
needs from a curve lives here: standard invariants, point counts and Hecke
traces, supersingularity tests, quadratic twists, real/imaginary periods by
arithmetic-geometric means, numeric twisted L-values, the formal-group
logarithm and p-adic point logarithms, and Frobenius module data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional, Sequence, Union

import mpmath

from .errors import (
    BadReduction,
    InvalidDiscriminant,
    NotSupersingular,
    PrecisionExhausted,
    SingularCurve,
    TorsionPoint,
)
from .padic import FrobeniusData, PadicNum, Rational, val_fraction, val_int

Point = Optional[tuple[Fraction, Fraction]]  # None is the point at infinity


# ---------------------------------------------------------------------------
# Kronecker symbol and discriminant predicates
# ---------------------------------------------------------------------------

def kronecker(d: int, n: int) -> int:
    """The Kronecker symbol (d|n), defined for all integers."""
    from sympy import jacobi_symbol

    if n == 0:
        return 1 if d in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if d < 0:
            sign = -sign
    # factor out 2s
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            if e % 2 == 1:
                sign = -sign
    if n == 1:
        return sign
    return sign * jacobi_symbol(d, n)


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    i = 2
    while i * i <= n:
        if n % (i * i) == 0:
            return False
        while n % i == 0:
            n //= i
        i += 1
    return True


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


# ---------------------------------------------------------------------------
# curve container and invariants
# ---------------------------------------------------------------------------

@dataclass
class Curve:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: Optional[str] = None
    conductor: Optional[int] = None
    tamagawa: Optional[int] = None
    torsion: Optional[int] = None
    twist_of: Optional[tuple["Curve", int]] = None
    warnings: tuple[str, ...] = ()
    _aell_cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- standard invariants -------------------------------------------------

    @property
    def a_invariants(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.discriminant)

    def display(self) -> str:
        return self.label or f"[{self.a1},{self.a2},{self.a3},{self.a4},{self.a6}]"


def derive_invariants(
    a_invariants: Sequence[int],
    label: Optional[str] = None,
    conductor: Optional[int] = None,
    tamagawa: Optional[int] = None,
    torsion: Optional[int] = None,
) -> Curve:
    """Build a curve from its five Weierstrass coefficients.

    Raises SingularCurve when the discriminant vanishes.  When a conductor is
    supplied, the model is screened for obvious non-minimality at each bad
    prime; findings are recorded as warnings (twist models are legitimately
    non-minimal at 2 and at primes dividing the twisting discriminant).
    """
    a1, a2, a3, a4, a6 = (int(a) for a in a_invariants)
    curve = Curve(a1, a2, a3, a4, a6, label=label, conductor=conductor,
                  tamagawa=tamagawa, torsion=torsion)
    disc = curve.discriminant
    if disc == 0:
        raise SingularCurve(f"discriminant of {curve.display()} vanishes")
    warnings = []
    if conductor is not None:
        for ell in _prime_factors(conductor):
            if disc % ell == 0 and val_int(ell, disc) >= 12 and (
                curve.c4 == 0 or val_int(ell, curve.c4) >= 4
            ):
                warnings.append(f"model may be non-minimal at {ell}")
    curve.warnings = tuple(warnings)
    return curve


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    i = 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# point counts and Hecke traces
# ---------------------------------------------------------------------------

def count_points_mod(curve: Curve, ell: int) -> int:
    """#E(F_ell) (projective) at a prime of good reduction for this model."""
    if curve.discriminant % ell == 0:
        raise BadReduction(f"{curve.display()} has bad reduction at {ell}")
    if ell == 2:
        count = 1  # infinity
        for x in range(2):
            for y in range(2):
                lhs = (y * y + curve.a1 * x * y + curve.a3 * y) % 2
                rhs = (x ** 3 + curve.a2 * x * x + curve.a4 * x + curve.a6) % 2
                if lhs == rhs:
                    count += 1
        return count
    squares = {(x * x) % ell for x in range(1, ell // 2 + 1)}
    b2, b4, b6 = curve.b2 % ell, curve.b4 % ell, curve.b6 % ell
    total = 0
    for x in range(ell):
        f = (4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6) % ell
        if f == 0:
            total += 1
        elif f in squares:
            total += 2
    return total + 1


def _nonsingular_count_bad(curve: Curve, ell: int) -> int:
    """#E^ns(F_ell) for a prime dividing the discriminant of this model."""
    if ell == 2:
        pts = 1
        for x in range(2):
            for y in range(2):
                if (y * y + curve.a1 * x * y + curve.a3 * y
                        - x ** 3 - curve.a2 * x * x - curve.a4 * x - curve.a6) % 2 == 0:
                    # smooth iff some partial derivative is nonzero
                    fx = (curve.a1 * y - 3 * x * x - 2 * curve.a2 * x - curve.a4) % 2
                    fy = (2 * y + curve.a1 * x + curve.a3) % 2
                    if fx or fy:
                        pts += 1
        return pts
    pts = 1
    a1, a2, a3, a4, a6 = (a % ell for a in curve.a_invariants)
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % ell == 0:
                fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % ell
                fy = (2 * y + a1 * x + a3) % ell
                if fx or fy:
                    pts += 1
    return pts


def trace_of_frobenius(curve: Curve, ell: int) -> int:
    """a_ell for any prime: counts points, falling back to the twist law.

    For primes of bad reduction of the *model* the resolution order is:
    (1) if the curve is a known twist and the law applies, use it;
    (2) if ell divides the supplied conductor, use the nonsingular count;
    (3) otherwise raise BadReduction (the model is defective at a good
        prime; callers may override from an ambient Hecke eigenvalue).
    """
    if ell in curve._aell_cache:
        return curve._aell_cache[ell]
    if curve.discriminant % ell != 0:
        a = ell + 1 - count_points_mod(curve, ell)
    elif curve.twist_of is not None and curve.twist_of[1] % ell != 0 and \
            curve.twist_of[0].discriminant % ell != 0:
        base, d = curve.twist_of
        a = kronecker(d, ell) * trace_of_frobenius(base, ell)
    elif curve.conductor is not None and curve.conductor % ell == 0:
        a = ell - _nonsingular_count_bad(curve, ell)
    else:
        raise BadReduction(
            f"model of {curve.display()} is defective at {ell} and no twist law applies"
        )
    assert a * a <= 4 * ell or (curve.conductor or 0) % ell == 0, "Hasse bound violated"
    curve._aell_cache[ell] = a
    return a


def an_coefficients(curve: Curve, limit: int, override: Optional[dict[int, int]] = None) -> list[int]:
    """Dirichlet coefficients a_1..a_limit of the L-series (index 0 unused)."""
    n_conductor = curve.conductor
    if n_conductor is None:
        raise ValueError("conductor required for L-series coefficients")
    a = [0] * (limit + 1)
    a[1] = 1
    spf = list(range(limit + 1))  # smallest prime factor sieve
    for i in range(2, isqrt(limit) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    for ell in range(2, limit + 1):
        if spf[ell] != ell:
            continue
        if override and ell in override:
            a_ell = override[ell]
        else:
            a_ell = trace_of_frobenius(curve, ell)
        good = n_conductor % ell != 0
        power = ell
        prev2, prev1 = 1, a_ell  # a_{ell^0}, a_{ell^1}
        while power <= limit:
            a[power] = prev1
            nxt = a_ell * prev1 - (ell * prev2 if good else 0)
            prev2, prev1 = prev1, nxt
            power *= ell
    for n in range(2, limit + 1):
        ell = spf[n]
        q = 1
        m = n
        while m % ell == 0:
            m //= ell
            q *= ell
        if m > 1:
            a[n] = a[q] * a[m]
    return a


# ---------------------------------------------------------------------------
# supersingularity and Frobenius data
# ---------------------------------------------------------------------------

def is_supersingular(curve: Curve, p: int) -> bool:
    """Whether p is a good supersingular prime (p >= 3, p not dividing disc)."""
    if p < 3:
        raise ValueError("supersingularity test requires p >= 3")
    if curve.discriminant % p == 0:
        raise BadReduction(f"{curve.display()} does not have good reduction at {p}")
    a_p = trace_of_frobenius(curve, p)
    return a_p % p == 0


def frobenius_data(curve: Curve, p: int) -> FrobeniusData:
    a_p = trace_of_frobenius(curve, p)
    if a_p % p != 0:
        raise NotSupersingular(
            f"{curve.display()} has a_{p} = {a_p}, not divisible by {p}"
        )
    return FrobeniusData(p, a_p)


# ---------------------------------------------------------------------------
# quadratic twists
# ---------------------------------------------------------------------------

def quadratic_twist(curve: Curve, d: int, p: Optional[int] = None) -> Curve:
    """The quadratic twist by a fundamental discriminant.

    The returned model is [0, d*b2, 0, 8*d^2*b4, 16*d^3*b6]; it is not
    2-minimal by construction, which is harmless downstream.  d must be a
    fundamental discriminant (or 1) prime to the conductor and to p.
    """
    if d == 1:
        return curve
    if not is_fundamental_discriminant(d):
        raise InvalidDiscriminant(f"{d} is not a fundamental discriminant")
    n_conductor = curve.conductor
    if n_conductor is not None and gcd(d, n_conductor) != 1:
        raise InvalidDiscriminant(f"{d} shares a factor with the conductor {n_conductor}")
    if p is not None and d % p == 0:
        raise InvalidDiscriminant(f"{d} is divisible by p = {p}")
    b2, b4, b6 = curve.b2, curve.b4, curve.b6
    twisted = Curve(
        0, d * b2, 0, 8 * d * d * b4, 16 * d ** 3 * b6,
        label=(f"{curve.label}^({d})" if curve.label else None),
        conductor=(n_conductor * d * d if n_conductor is not None else None),
        twist_of=(curve, d),
    )
    if twisted.discriminant == 0:
        raise SingularCurve("twist collapsed; invalid input model")
    return twisted


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------

def _period_from_roots(roots: list, bits: int):
    """Least positive real period of y^2 = f(x) given the roots of f/4."""
    tol = mpmath.mpf(2) ** (-bits // 2)
    reals = [r for r in roots if abs(mpmath.im(r)) < tol]
    if len(reals) == 3:
        e = sorted((mpmath.re(r) for r in roots), reverse=True)
        agm = mpmath.agm(mpmath.sqrt(e[0] - e[1]), mpmath.sqrt(e[0] - e[2]))
        return mpmath.pi / agm, True
    if len(reals) != 1:
        raise PrecisionExhausted("could not separate cubic roots at working precision")
    e1 = mpmath.re(reals[0])
    others = sorted(roots, key=lambda r: -abs(mpmath.im(r)))[:2]
    agm = mpmath.agm(mpmath.sqrt(e1 - others[0]), mpmath.sqrt(e1 - others[1]))
    if abs(mpmath.im(agm)) > abs(agm) * mpmath.mpf(2) ** (-bits // 4):
        raise PrecisionExhausted("complex AGM failed to become real")
    period = mpmath.pi / mpmath.re(agm)
    return period, False


def real_periods(curve: Curve, bits: int = 128) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(Omega_plus, Omega_minus): the real period of E and of its (-1)-twist.

    Omega_plus is the integral of |omega| over E(R) (doubled when the real
    locus has two components).  Omega_minus is the analogous normalizing
    period for odd twists.  Rational factors of 2 between conventions are
    absorbed by the symbol-space normalization.
    """
    with mpmath.workprec(bits + 32):
        b2, b4, b6 = curve.b2, curve.b4, curve.b6
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], extraprec=64)
        om_plus, three_real = _period_from_roots(list(roots), bits)
        if three_real:
            om_plus *= 2
        # roots of the (-1)-twist quartic scale: f^-(x) = -f(-x)
        neg_roots = [-r for r in roots]
        om_minus, three_real_m = _period_from_roots(neg_roots, bits)
        if three_real_m:
            om_minus *= 2
        return +om_plus, +om_minus


def period_integral_oracle(curve: Curve, bits: int = 80):
    """Independent check value: 2 * integral_{e1}^{inf} dx / sqrt(f(x)).

    Only used by tests; integrates the invariant differential numerically
    over the unbounded real component.
    """
    with mpmath.workprec(bits):
        b2, b4, b6 = curve.b2, curve.b4, curve.b6
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], extraprec=64)
        tol = mpmath.mpf(2) ** (-bits // 2)
        e1 = max(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol)
        c1 = 12 * e1 * e1 + 2 * b2 * e1 + 2 * b4  # f'(e1)
        c2 = 12 * e1 + b2                          # f''(e1)/2
        # substitute x = e1 + u^2; with h = u^2,
        # f(e1+h) = c1 h + c2 h^2 + 4 h^3 exactly, so the integrand is smooth:
        # dx/sqrt(f) = 2 du / sqrt(c1 + c2 h + 4 h^2)

        def g(u):
            h = u * u
            return 2 / mpmath.sqrt(c1 + h * (c2 + 4 * h))

        return 2 * mpmath.quad(g, [0, mpmath.inf])


# ---------------------------------------------------------------------------
# numeric L-values of quadratic twists
# ---------------------------------------------------------------------------

def l_value_numeric(
    curve: Curve,
    d: int = 1,
    bits: int = 96,
    override: Optional[dict[int, int]] = None,
):
    """L(E, chi_d, 1) as a float, with the functional-equation sign solved.

    Uses the standard two-point exponential sum: for any t > 0,
    L(1) = S(t) + w * S(1/t) with S(t) = sum a_n chi(n)/n exp(-2 pi n t / A),
    A = sqrt(N d^2).  Evaluating at two values of t determines w; |w| must
    come out 1 to working tolerance or PrecisionExhausted is raised.
    Returns (L_value, sign).
    """
    if curve.conductor is None:
        raise ValueError("conductor required for numeric L-values")
    with mpmath.workprec(bits + 48):
        a_big = mpmath.sqrt(mpmath.mpf(curve.conductor) * d * d)
        scale = a_big / (2 * mpmath.pi)
        terms = int(mpmath.ceil(scale * 46)) + 24
        coeffs = an_coefficients(curve, terms, override=override)
        chis = [0] * (terms + 1)
        for n in range(1, terms + 1):
            chis[n] = kronecker(d, n)

        def s_sum(t):
            acc = mpmath.mpf(0)
            x = mpmath.exp(-2 * mpmath.pi * t / a_big)
            xn = mpmath.mpf(1)
            for n in range(1, terms + 1):
                xn *= x
                c = coeffs[n] * chis[n]
                if c:
                    acc += mpmath.mpf(c) / n * xn
            return acc

        t1, t2 = mpmath.mpf("1.1"), mpmath.mpf("0.9")
        s_t1, s_t2 = s_sum(t1), s_sum(t2)
        st_t1, st_t2 = s_sum(1 / t1), s_sum(1 / t2)
        denom = st_t1 - st_t2
        if abs(denom) < mpmath.mpf(2) ** (-bits):
            # sign-independent situation: both assemble to the same value
            w = mpmath.mpf(1)
            value = s_t1 + st_t1
            return value, 0
        w = (s_t2 - s_t1) / denom
        if abs(abs(w) - 1) > mpmath.mpf(10) ** (-6):
            raise PrecisionExhausted(f"functional-equation sign came out {w}")
        w_int = 1 if w > 0 else -1
        v1 = s_t1 + w_int * st_t1
        v2 = s_t2 + w_int * st_t2
        if abs(v1 - v2) > mpmath.mpf(10) ** (-max(8, bits // 12)) * (1 + abs(v1)):
            raise PrecisionExhausted("two-point L-value evaluations disagree")
        return (v1 + v2) / 2, w_int


# ---------------------------------------------------------------------------
# formal group logarithm and point logarithms
# ---------------------------------------------------------------------------

def formal_log(curve: Curve, p: int, prec: int) -> tuple[Fraction, ...]:
    """Coefficients c_1..c_T of the formal logarithm, c_n = (integral of
    the invariant differential), with T chosen so the tail is O(p**prec)
    on points of valuation >= 1.  c_n has denominator dividing n.
    """
    t_len = prec + 1
    while p ** (t_len - prec) <= t_len:  # ensure n - ord_p(n!)-style slack
        t_len += 1
    t_len += 2
    a1, a2, a3, a4, a6 = (Fraction(a) for a in curve.a_invariants)
    # w(t) = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3, solved by iteration
    order = t_len + 4
    w = [Fraction(0)] * order
    if order > 3:
        w[3] = Fraction(1)

    def mul(f, g):
        out = [Fraction(0)] * order
        for i, fi in enumerate(f):
            if fi == 0:
                continue
            for j, gj in enumerate(g):
                if gj and i + j < order:
                    out[i + j] += fi * gj
        return out

    for _ in range(order):
        w2 = mul(w, w)
        w3 = mul(w2, w)
        new = [Fraction(0)] * order
        new[3] = Fraction(1)
        for i in range(order):
            if i + 1 < order:
                new[i + 1] += a1 * w[i]
            if i + 2 < order:
                new[i + 2] += a2 * w[i]
            new[i] += a3 * w2[i] + a6 * w3[i]
            if i + 1 < order:
                new[i + 1] += a4 * w2[i]
        if new == w:
            break
        w = new
    # x = t/w - expand 1/w = t^{-3} * 1/(1 + u) with w = t^3(1 + u)
    u = [w[i + 3] for i in range(order - 3)]  # 1 + u series; u[0] == 1
    assert u[0] == 1
    inv = [Fraction(0)] * len(u)
    inv[0] = Fraction(1)
    for i in range(1, len(u)):
        acc = Fraction(0)
        for j in range(1, i + 1):
            acc += u[j] * inv[i - j]
        inv[i] = -acc
    # x(t) = t * t^{-3} * inv = t^{-2} * inv ; y(t) = -1/w = -t^{-3} inv
    # omega/dt = x'(t) / (2 y + a1 x + a3)
    # x'(t): derivative of sum inv[i] t^{i-2}
    xprime = [Fraction(0)] * (len(inv) + 1)  # coefficient of t^k in x'(t) is at index k+3
    for i, c in enumerate(inv):
        e = i - 2
        if c and e != 0:
            xprime[e - 1 + 3] = c * e
    denom = [Fraction(0)] * order  # series of t^3 * (2y + a1 x + a3)
    for i, c in enumerate(inv):
        denom[i] += -2 * c  # t^3 * 2y = -2 inv
        if i + 1 < order:
            denom[i + 1] += a1 * c  # t^3 * a1 x = a1 t inv
    if 3 < order:
        denom[3] += a3
    # F(t) = x'(t)/(2y + a1 x + a3) = (t^3 x'(t)) / (t^3 denom-series)
    num = [Fraction(0)] * order
    for k in range(min(len(xprime), order)):
        num[k] = xprime[k]
    assert denom[0] == -2
    f_series = [Fraction(0)] * order
    for i in range(order):
        acc = num[i]
        for j in range(1, i + 1):
            acc -= denom[j] * f_series[i - j]
        f_series[i] = acc / denom[0]
    # F = 1 + O(t); logarithm coefficients c_n = F_{n-1}/n
    assert f_series[0] == 1
    return tuple(f_series[n - 1] / n for n in range(1, t_len + 1))


def formal_log_eval(coeffs: Sequence[Fraction], t: Fraction, p: int, prec: int) -> PadicNum:
    """Evaluate the formal logarithm at a point of positive valuation."""
    vt = val_fraction(p, t)
    if vt is None or vt < 1:
        raise ValueError("formal logarithm requires valuation >= 1")
    acc = Fraction(0)
    tn = Fraction(1)
    for n, c in enumerate(coeffs, start=1):
        tn *= t
        acc += c * tn
    # tail bound: next terms have valuation >= (len+1)*vt - ord(n) >= prec by T choice
    return PadicNum.from_fraction(p, acc, prec)


# -- rational point arithmetic ----------------------------------------------

def on_curve(curve: Curve, pt: Point) -> bool:
    if pt is None:
        return True
    x, y = Fraction(pt[0]), Fraction(pt[1])
    return (
        y * y + curve.a1 * x * y + curve.a3 * y
        == x ** 3 + curve.a2 * x * x + curve.a4 * x + curve.a6
    )


def negate_point(curve: Curve, pt: Point) -> Point:
    if pt is None:
        return None
    x, y = pt
    return (x, -y - curve.a1 * x - curve.a3)


def add_points(curve: Curve, pt1: Point, pt2: Point) -> Point:
    if pt1 is None:
        return pt2
    if pt2 is None:
        return pt1
    a1, a2, a3, a4 = (Fraction(a) for a in (curve.a1, curve.a2, curve.a3, curve.a4))
    x1, y1 = pt1
    x2, y2 = pt2
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def scalar_mul(curve: Curve, k: int, pt: Point) -> Point:
    if k < 0:
        return scalar_mul(curve, -k, negate_point(curve, pt))
    out: Point = None
    base = pt
    while k:
        if k & 1:
            out = add_points(curve, out, base)
        base = add_points(curve, base, base)
        k >>= 1
    return out


def point_log(curve: Curve, p: int, pt: Point, prec: int) -> PadicNum:
    """The p-adic logarithm of a rational point (normalized by log on the
    formal group; multiples are cleared through the reduction order).

    Raises TorsionPoint for torsion input.  The result is exact linear:
    point_log(mP) = m * point_log(P).
    """
    if pt is None:
        return PadicNum.zero(p, prec)
    if not on_curve(curve, pt):
        raise ValueError(f"point {pt} is not on {curve.display()}")
    frob = frobenius_data(curve, p)
    n_p = p + 1 - frob.a_p
    divisors = sorted(d for d in range(1, n_p + 1) if n_p % d == 0)
    for d in divisors:
        q = scalar_mul(curve, d, pt)
        if q is None:
            raise TorsionPoint(f"{pt} is a torsion point of order dividing {d}")
        x, y = q
        vx = val_fraction(p, x)
        if vx is not None and vx < 0:
            t = -x / y
            coeffs = formal_log(curve, p, prec)
            lam = formal_log_eval(coeffs, t, p, prec)
            # d is prime to p (the reduction order is 1 mod p), so dividing
            # by d keeps the stated absolute precision
            return lam.scale(Fraction(1, d))
    raise TorsionPoint(
        f"no multiple of {pt} through {n_p} entered the formal group; "
        "the point reduces into every fiber (torsion-like input)"
    )


# ---------------------------------------------------------------------------
# model transport
# ---------------------------------------------------------------------------

def transform_point(src: Curve, dst: Curve, pt: Point) -> Point:
    """Carry a point across an isomorphism of models of the same curve.

    The substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t maps points
    of src to points of dst; u^2 is recovered from the c-invariants and must
    be a rational square.
    """
    if pt is None:
        return None
    u_sq = Fraction(dst.c6 * src.c4, src.c6 * dst.c4)
    num, den = u_sq.numerator, u_sq.denominator
    if num <= 0:
        raise ValueError("models are not related by a rational isomorphism")
    sn, sd = isqrt(num), isqrt(den)
    if sn * sn != num or sd * sd != den:
        raise ValueError("u^2 is not a rational square; models not isomorphic over Q")
    u = Fraction(sn, sd)
    r = (u_sq * src.b2 - dst.b2) / 12
    s = (u * src.a1 - dst.a1) / 2
    t = (u ** 3 * src.a3 - dst.a3 - r * dst.a1) / 2
    x_src, y_src = pt
    x_dst = u_sq * x_src + r
    y_dst = u ** 3 * y_src + s * u_sq * x_src + t
    out = (x_dst, y_dst)
    if not on_curve(dst, out):
        raise ValueError("transported point missed the target model")
    return out

"""Frozen oracles and property tests for curve invariants and periods."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclf.curves import (
    add_points,
    an_coefficients,
    count_points_mod,
    derive_invariants,
    formal_log,
    formal_log_eval,
    frobenius_data,
    is_fundamental_discriminant,
    is_squarefree,
    is_supersingular,
    kronecker,
    l_value_numeric,
    negate_point,
    on_curve,
    period_integral_oracle,
    point_log,
    quadratic_twist,
    real_periods,
    scalar_mul,
    trace_of_frobenius,
    transform_point,
)
from padiclf.errors import (
    BadReduction,
    InvalidDiscriminant,
    NotSupersingular,
    SingularCurve,
    TorsionPoint,
)

C11 = derive_invariants((0, -1, 1, -10, -20), label="11A", conductor=11)
C17 = derive_invariants((1, -1, 1, -1, -14), label="17A", conductor=17)
C43 = derive_invariants((0, 1, 1, 0, 0), label="43A", conductor=43)
C40 = derive_invariants((0, 0, 0, -7, -6), label="40A", conductor=40)
C106 = derive_invariants((1, 0, 0, -283, -2351), label="106C", conductor=106)


# ----------------------------------------------------------------------
# invariants
# ----------------------------------------------------------------------

def test_invariant_identity():
    for c in (C11, C17, C43, C40, C106):
        assert c.c4 ** 3 - c.c6 ** 2 == 1728 * c.discriminant


def test_discriminants():
    assert C11.discriminant == -(11 ** 5)
    assert C17.discriminant == -(17 ** 4)
    assert C43.discriminant == -43
    assert C17.j_invariant == Fraction(-35937, 83521)


def test_singular_curve_rejected():
    with pytest.raises(SingularCurve):
        derive_invariants((0, 0, 0, 0, 0))
    with pytest.raises(SingularCurve):
        derive_invariants((0, 0, 0, -3, 2))  # y^2 = (x-1)^2 (x+2)


# ----------------------------------------------------------------------
# point counting and traces
# ----------------------------------------------------------------------

def test_trace_tables():
    assert {l: trace_of_frobenius(C11, l) for l in (2, 3, 5, 7, 13)} == \
        {2: -2, 3: -1, 5: 1, 7: -2, 13: 4}
    assert {l: trace_of_frobenius(C17, l) for l in (2, 3, 5, 7, 13)} == \
        {2: -1, 3: 0, 5: -2, 7: 4, 13: -2}
    assert {l: trace_of_frobenius(C43, l) for l in (2, 3, 5, 7, 11, 13)} == \
        {2: -2, 3: -2, 5: -4, 7: 0, 11: 3, 13: -5}


def test_hasse_bound():
    for c in (C11, C17, C43, C40):
        for ell in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
            if c.conductor % ell == 0:
                continue
            a = trace_of_frobenius(c, ell)
            assert a * a <= 4 * ell
            assert count_points_mod(c, ell) == ell + 1 - a


def test_bad_reduction_detected():
    with pytest.raises(BadReduction):
        count_points_mod(C17, 17)


def test_an_multiplicativity_and_recursion():
    an = an_coefficients(C17, 200)
    assert an[:21] == [0, 1, -1, 0, -1, -2, 0, 4, 3, -3, 2, 0, 0, -2, -4,
                       0, -1, 1, 3, -4, 2]
    for m, n in [(3, 4), (5, 7), (9, 11), (2, 75)]:
        if math.gcd(m, n) == 1:
            assert an[m * n] == an[m] * an[n]
    for ell in (2, 3, 5, 7, 11, 13):
        # a_{l^2} = a_l^2 - l for good primes
        assert an[ell * ell] == an[ell] ** 2 - (0 if 17 % ell == 0 else ell)


def test_supersingularity():
    assert is_supersingular(C17, 3)
    assert is_supersingular(C43, 7)
    assert is_supersingular(C106, 5)
    assert not is_supersingular(C17, 5)
    with pytest.raises(NotSupersingular):
        frobenius_data(C17, 5)
    fr = frobenius_data(C17, 3)
    assert (fr.p, fr.a_p) == (3, 0)


# ----------------------------------------------------------------------
# quadratic twists
# ----------------------------------------------------------------------

def test_twist_invariants():
    tw = quadratic_twist(C17, 5)
    assert tw.j_invariant == C17.j_invariant
    assert tw.conductor == 17 * 25
    with pytest.raises(InvalidDiscriminant):
        quadratic_twist(C17, 17)  # shares a factor with the conductor
    with pytest.raises(InvalidDiscriminant):
        quadratic_twist(C17, 12, p=3)  # twist must be prime to p


@pytest.mark.parametrize("d", [5, -3, -7, 13])
def test_twist_trace_law(d):
    tw = quadratic_twist(C17, d)
    for ell in (3, 7, 11, 13, 19, 23):
        if (2 * 17 * d) % ell == 0:
            continue
        assert trace_of_frobenius(tw, ell) == \
            kronecker(d, ell) * trace_of_frobenius(C17, ell)


def test_kronecker_symbol():
    from sympy import jacobi_symbol
    for d in range(1, 60, 2):
        for n in range(1, 60, 2):
            assert kronecker(d, n) == jacobi_symbol(d, n)
    assert kronecker(-127, 2) == 1      # -127 = 1 mod 8
    assert kronecker(5, 2) == -1        # 5 = -3 mod 8
    assert kronecker(12, 2) == 0
    assert kronecker(-4, 7) == kronecker(-1, 7) * kronecker(4, 7)


def test_fundamental_discriminants():
    fundamental = [d for d in range(-30, 30)
                   if d != 0 and is_fundamental_discriminant(d)]
    assert fundamental == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3,
                           1, 5, 8, 12, 13, 17, 21, 24, 28, 29]
    assert is_squarefree(30) and not is_squarefree(12)


# ----------------------------------------------------------------------
# periods
# ----------------------------------------------------------------------

def test_periods_vs_quadrature():
    for curve in (C17, C43, C11):
        om_plus, om_minus = real_periods(curve, bits=128)
        oracle = period_integral_oracle(curve, bits=80)
        assert abs(float(om_plus) - float(oracle)) < 1e-18 * float(om_plus)
        assert float(om_minus) > 0


def test_lemniscatic_period():
    # y^2 = x^3 - x has fundamental real period Gamma(1/4)^2 / sqrt(2 pi), doubled
    c = derive_invariants((0, 0, 0, -1, 0), label="32A", conductor=32)
    om_plus, _ = real_periods(c, bits=160)
    mpmath.mp.prec = 200
    expected = mpmath.gamma(Fraction(1, 4)) ** 2 / mpmath.sqrt(2 * mpmath.pi)
    assert abs(om_plus - expected) < mpmath.mpf(2) ** -120


def test_l_value_ratios():
    om11 = real_periods(C11, bits=128)[0]
    om17 = real_periods(C17, bits=128)[0]
    L11, w11 = l_value_numeric(C11, 1)
    L17, w17 = l_value_numeric(C17, 1)
    L43, w43 = l_value_numeric(C43, 1)
    assert w11 == 1 and w17 == 1 and w43 == -1
    assert abs(float(L11 / om11) - 0.2) < 1e-12
    assert abs(float(L17 / om17) - 0.25) < 1e-12
    assert abs(float(L43)) < 1e-20


# ----------------------------------------------------------------------
# formal group logarithm and rational points
# ----------------------------------------------------------------------

def test_formal_log_integrality():
    for curve, p in [(C17, 3), (C43, 7)]:
        coeffs = formal_log(curve, p, 12)
        assert coeffs[0] == 1
        for n, c in enumerate(coeffs, start=1):
            # n * c_n is p-integral
            v = (c * n).denominator
            assert v % p != 0


def test_point_arithmetic():
    P = (Fraction(0), Fraction(0))
    assert on_curve(C43, P)
    Q8 = scalar_mul(C43, 8, P)
    assert Q8 == (Fraction(11, 49), Fraction(20, 343))
    assert on_curve(C43, Q8)
    mP = negate_point(C43, P)
    assert add_points(C43, P, mP) is None
    assert on_curve(C43, add_points(C43, P, Q8))


def test_point_log_frozen_value():
    P = (Fraction(0), Fraction(0))
    lg = point_log(C43, 7, P, prec=5)
    lg8 = lg.scale(8)
    assert lg8.residue(2) == 28      # logarithm of the 8th multiple mod 7^2


def test_point_log_linearity():
    P = (Fraction(0), Fraction(0))
    base = point_log(C43, 7, P, prec=6)
    for m in (2, 3, 5, 8):
        Q = scalar_mul(C43, m, P)
        lm = point_log(C43, 7, Q, prec=6)
        diff = lm - base.scale(m)
        assert not diff.is_certain_nonzero()


def test_point_log_rejects_torsion():
    T = (Fraction(7), Fraction(13))  # 4-torsion
    assert on_curve(C17, T)
    with pytest.raises(TorsionPoint):
        point_log(C17, 3, T, prec=5)


def test_twisted_curve_point_and_log():
    # rank-1 twist data: point of infinite order on the printed model
    tw = derive_invariants((0, 0, 1, 112903, 22020117),
                           label="115A^(-127)", conductor=115 * 127 ** 2)
    P = (Fraction(11049, 484), Fraction(52817151, 10648))
    assert on_curve(tw, P)
    Q = scalar_mul(tw, 4, P)
    lg = point_log(tw, 3, Q, prec=6)
    assert lg.val == 2
    assert lg.residue(5) == 2 * 9 + 81
    lgP = point_log(tw, 3, P, prec=6)
    assert (lgP.scale(4) - lg).is_certain_nonzero() is False


def test_transform_point_between_models():
    # scale the generator's model by u = 2
    src = C43
    dst = derive_invariants((0, 4, 8, 0, 0), conductor=43)
    P = (Fraction(11, 49), Fraction(20, 343))
    img = transform_point(src, dst, P)
    assert on_curve(dst, img)
    back = transform_point(dst, src, img)
    assert back == P


def test_formal_log_eval_matches_series():
    from padiclf.padic import PadicNum
    coeffs = formal_log(C17, 3, 8)
    t = Fraction(3, 5)
    val = formal_log_eval(coeffs, t, 3, 8)
    acc = sum((c * t ** (i + 1) for i, c in enumerate(coeffs)), Fraction(0))
    diff = val - PadicNum.from_fraction(3, acc, val.prec)
    assert not diff.is_certain_nonzero()
    assert val.val == 1

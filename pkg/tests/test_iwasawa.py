"""Tests for stabilized invariants, growth exponents and coprimality.

Expected values were computed independently (exact rational arithmetic
over the full symbol tables, resultants via sympy on the frozen
coefficient lists) before being asserted here; published profile rows
for the same twists agree with every value below.
"""

from fractions import Fraction

import pytest

from padiclf.curves import Curve
from padiclf.errors import DepthInsufficient, NotStabilized, UnsupportedPattern
from padiclf.iwasawa import (
    Coprimality,
    GrowthModel,
    growth_exponent,
    growth_model,
    lambda_floor,
    profile,
    profile_row,
    resultant_valuation,
    sha_growth,
    xi_coprimality,
)
from padiclf.lfunction import MazurTateFamily, build_family, measure_context
from padiclf.padic import lambda_mu, xi_poly

C17 = Curve(1, -1, 1, -1, -14, label="17a1", conductor=17)
C37 = Curve(0, 0, 1, -1, 0, label="37a1", conductor=37)
C40 = Curve(0, 0, 0, -7, -6, label="40a1", conductor=40)
C43 = Curve(0, 1, 1, 0, 0, label="43a1", conductor=43)
C62 = Curve(1, -1, 1, -1, 1, label="62a1", conductor=62)
C73 = Curve(1, -1, 0, 4, -3, label="73a1", conductor=73)
C142 = Curve(1, -1, 0, -1, -3, label="142c1", conductor=142)
C14 = Curve(1, 0, 1, 4, -6, label="14a1", conductor=14)

_cache: dict = {}


def fam(curve: Curve, p: int, d: int = 1, depth: int = 4) -> MazurTateFamily:
    key = (curve.label, p, d, depth)
    if key not in _cache:
        ctx = measure_context(curve, p, d=d, precision=depth + 12)
        _cache[key] = build_family(ctx, depth)
    return _cache[key]


# ---------------------------------------------------------------------------
# staircase and profiles
# ---------------------------------------------------------------------------


def test_lambda_floor_small_values():
    assert [lambda_floor(3, n) for n in range(6)] == [0, 0, 2, 6, 20, 60]
    assert lambda_floor(17, 2) == 16
    assert lambda_floor(19, 2) == 18
    with pytest.raises(ValueError):
        lambda_floor(3, -1)


def test_profile_17a_untwisted_unit_everywhere():
    prof = profile(fam(C17, 3))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (0, 0)
    assert (prof.onset_plus, prof.onset_minus) == (0, 1)
    assert prof.mu0 == 0 and prof.sign == 1
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (0, 0), (0, 0), (0, 2), (0, 6), (0, 20)]
    assert prof.lam_plus == Fraction(-1, 4)
    assert prof.lam_minus == Fraction(-3, 4)
    assert profile_row(prof, "CP") == "3 | 0 | 0,0 | 0,2 | 0,6 | 0,20 | CP | 0 | 0"


def test_profile_17a_twist_373():
    prof = profile(fam(C17, 3, d=373, depth=3))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (4, 2)
    assert (prof.onset_plus, prof.onset_minus) == (2, 1)
    assert prof.mu0 == 2
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (2, 0), (0, 2), (0, 6), (0, 8)]
    assert prof.lam_plus == Fraction(15, 4)
    assert prof.lam_minus == Fraction(5, 4)


def test_profile_17a_twist_m167_late_onsets():
    prof = profile(fam(C17, 3, d=-167))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (8, 4)
    assert (prof.onset_plus, prof.onset_minus) == (4, 3)
    assert prof.mu0 == 2
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (2, 0), (1, 2), (1, 6), (0, 10), (0, 28)]


def test_profile_17a_twist_m187():
    prof = profile(fam(C17, 3, d=-187, depth=3))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (2, 4)
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (2, 0), (1, 2), (0, 4), (0, 10)]


def test_profile_17a_twist_m239_positive_rank():
    prof = profile(fam(C17, 3, d=-239, depth=3))
    assert prof.mu0 is None and prof.sign is None
    assert prof.levels[0].is_zero
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (1, 9)
    assert [(r.mu, r.lam) for r in prof.levels[1:]] == [(1, 1), (0, 3), (0, 15)]
    assert profile_row(prof, "*CP") == "3 | inf | 1,1 | 0,3 | 0,15 |  | *CP | 9 | 1"


def test_profile_40a_twist_needs_depth_beyond_two():
    with pytest.raises(DepthInsufficient):
        profile(fam(C40, 3, d=-379, depth=2))
    prof = profile(fam(C40, 3, d=-379))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (8, 4)
    assert (prof.onset_plus, prof.onset_minus) == (4, 3)
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (2, 0), (2, 0), (1, 4), (0, 10), (0, 28)]


def test_profile_62a_twist_m296():
    prof = profile(fam(C62, 3, d=-296))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (8, 6)
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (2, 0), (1, 2), (1, 4), (0, 12), (0, 28)]


def test_profile_142c_twist_53_shallow():
    prof = profile(fam(C142, 3, d=53, depth=2))
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (4, 2)
    assert prof.mu0 == 3
    assert [(r.mu, r.lam) for r in prof.levels] == [(3, 0), (0, 2), (0, 6)]


def test_profile_142c_twist_397_resists_false_even_stabilization():
    # even levels read (1,0), (1,2), (0,30): the first two satisfy the
    # lambda progression with equal positive mu, yet the content drops
    # to a unit at depth 4 - certification must wait for that level
    prof = profile(fam(C142, 3, d=397))
    assert [(r.mu, r.lam) for r in prof.levels] == [
        (1, 0), (1, 0), (1, 2), (0, 10), (0, 30)]
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (10, 4)
    assert (prof.onset_plus, prof.onset_minus) == (4, 3)


def test_profile_14a_twist_12_skips_vanishing_level():
    prof = profile(fam(C14, 5, d=12, depth=3))
    assert prof.mu0 is None
    assert prof.levels[1].is_zero
    assert [(r.mu, r.lam) for r in prof.levels[2:]] == [(0, 5), (0, 25)]
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (1, 5)
    assert profile_row(prof, "*CP") == "5 | inf | inf | 0,5 | 0,25 |  | *CP | 5 | 1"


def test_profile_37a_at_17_and_19():
    p17 = profile(fam(C37, 17, depth=2))
    assert (p17.lam_tilde_plus, p17.lam_tilde_minus) == (3, 1)
    assert [(r.mu, r.lam) for r in p17.levels] == [(None, None), (0, 1), (0, 19)]
    assert p17.levels[0].is_zero
    assert (p17.lam_plus, p17.lam_minus) == (Fraction(53, 18), Fraction(1, 18))
    p19 = profile(fam(C37, 19, depth=2))
    assert (p19.lam_tilde_plus, p19.lam_tilde_minus) == (1, 1)
    assert [(r.mu, r.lam) for r in p19.levels[1:]] == [(0, 1), (0, 19)]
    assert (p19.lam_plus, p19.lam_minus) == (Fraction(19, 20), Fraction(1, 20))


def test_profile_43a_at_7():
    prof = profile(fam(C43, 7, depth=2))
    assert prof.mu0 is None
    assert (prof.lam_tilde_plus, prof.lam_tilde_minus) == (3, 1)
    assert [(r.mu, r.lam) for r in prof.levels[1:]] == [(0, 1), (0, 9)]


def test_profile_rejects_shallow_family():
    ctx = measure_context(C17, 3, precision=12)
    shallow = build_family(ctx, 2)
    with pytest.raises(DepthInsufficient):
        profile(MazurTateFamily(ctx, shallow.polys[:2]))


def test_profile_rejects_broken_progression():
    base = fam(C17, 3)
    # multiply the level-3 polynomial by x: lambda_3 jumps from 6 to 7,
    # violating the forced progression after odd certification at level 1
    polys = list(base.polys)
    shifted = polys[3].make(3, (Fraction(0),) + tuple(polys[3].coeffs))
    polys[3] = shifted
    with pytest.raises(UnsupportedPattern):
        profile(MazurTateFamily(base.context, polys))


# ---------------------------------------------------------------------------
# growth exponents
# ---------------------------------------------------------------------------


def test_growth_exponent_unit_case_matches_floor_formula():
    model = growth_model(profile(fam(C17, 3)))
    for n in range(13):
        assert growth_exponent(model, n) == (2 * 3 ** (n + 1) - 8 * n) // 16
    assert growth_exponent(model, 2) == 2


def test_growth_exponent_integrality_for_all_profiles():
    for curve, p, d, depth in [
        (C17, 3, 1, 4), (C17, 3, 373, 3), (C17, 3, -167, 4),
        (C40, 3, -379, 4), (C62, 3, -296, 4), (C142, 3, 397, 4),
        (C37, 17, 1, 2), (C37, 19, 1, 2), (C43, 7, 1, 2),
    ]:
        model = growth_model(profile(fam(curve, p, d=d, depth=depth)))
        for n in range(13):
            growth_exponent(model, n)  # raises if non-integral


def test_growth_exponent_with_positive_mu_terms():
    model = GrowthModel(p=3, mu_plus=1, mu_minus=2,
                        lam_plus=Fraction(-1, 4), lam_minus=Fraction(-3, 4))
    for n in range(9):
        assert growth_exponent(model, n) >= 0
    assert growth_exponent(model, 0) == 0
    # mu contributions at n = 2: 1*(27-3)/4 + 2*(9-1)/4 = 6 + 4
    assert growth_exponent(model, 2) == 2 + 10


def test_growth_exponent_requires_stabilized_model():
    with pytest.raises(NotStabilized):
        growth_exponent(GrowthModel(3, None, 0, Fraction(0), Fraction(0)), 1)
    model = growth_model(profile(fam(C17, 3)))
    with pytest.raises(ValueError):
        growth_exponent(model, -1)


def test_lambda_sum_is_integral():
    for curve, p, d, depth in [(C17, 3, 373, 3), (C37, 17, 1, 2), (C43, 7, 1, 2)]:
        prof = profile(fam(curve, p, d=d, depth=depth))
        assert (prof.lam_plus + prof.lam_minus).denominator == 1


# ---------------------------------------------------------------------------
# assembled growth laws
# ---------------------------------------------------------------------------


def test_sha_growth_17a_unit_family_floor_form():
    family = fam(C17, 3)
    g = sha_growth(profile(family), family)
    assert g.formula == "floor(3^(n+1)/8 - n/2)"
    assert g.offset == 0 and not g.symbolic
    assert g.contributions == ((0, 0, 0), (1, 0, 0), (2, 2, 2))
    assert g.table == {0: 0, 1: 0, 2: 2, 3: 8, 4: 28}


def test_sha_growth_17a_twist_373_offset_two():
    family = fam(C17, 3, d=373, depth=3)
    g = sha_growth(profile(family), family)
    assert g.contributions == ((0, 2, 2), (1, 2, 4), (2, 6, 10))
    assert g.offset == 2
    assert (g.half_plus, g.half_minus) == (Fraction(15, 4), Fraction(5, 4))
    assert g.formula == ("3(3^n - 1)/8 + (15/4)*floor(n/2)"
                         " + (5/4)*floor((n+1)/2) + 2")
    assert g.table == {0: 2, 1: 4, 2: 10, 3: 18}


def test_sha_growth_40a_twist_resultants_and_offset():
    family = fam(C40, 3, d=-379)
    g = sha_growth(profile(family), family)
    assert g.contributions == ((0, 2, 2), (1, 4, 6), (2, 10, 16))
    assert g.offset == 2
    assert g.table[3] == 26 and g.table[4] == 54


def test_sha_growth_62a_twist_zero_offset():
    family = fam(C62, 3, d=-296)
    g = sha_growth(profile(family), family)
    assert g.contributions == ((0, 2, 2), (1, 4, 6), (2, 10, 16))
    assert g.offset == 0


def test_sha_growth_17a_twist_m167_symbolic_rank_deduction():
    family = fam(C17, 3, d=-167)
    g = sha_growth(profile(family), family, rank_s=2)
    assert g.symbolic and g.offset is None and g.contributions == ()
    assert (g.half_plus, g.half_minus) == (Fraction(23, 4), Fraction(5, 4))
    assert g.formula == ("3(3^n - 1)/8 + (23/4)*floor(n/2)"
                         " + (5/4)*floor((n+1)/2) + nu")
    assert g.table[2] == 0  # relative to the symbolic base


def test_sha_growth_vanishing_level0_requires_rank():
    family = fam(C17, 3, d=-239, depth=3)
    prof = profile(family)
    with pytest.raises(UnsupportedPattern):
        sha_growth(prof, family, rank_s=0)
    g = sha_growth(prof, family, rank_s=1)
    assert g.half_plus == prof.lam_plus - 1
    assert g.half_minus == prof.lam_minus - 1


def test_sha_growth_parameter_validation():
    family = fam(C17, 3)
    prof = profile(family)
    with pytest.raises(ValueError):
        sha_growth(prof, family, low_depth=1)
    with pytest.raises(DepthInsufficient):
        sha_growth(prof, family, low_depth=5)
    with pytest.raises(ValueError):
        sha_growth(prof, family, rank_s=-1)


# ---------------------------------------------------------------------------
# coprimality with the cyclotomic pieces
# ---------------------------------------------------------------------------


def test_xi_coprimality_17a_twist_373_all_coprime():
    family = fam(C17, 3, d=373, depth=3)
    r1 = xi_coprimality(family, 1)
    r2 = xi_coprimality(family, 2)
    r3 = xi_coprimality(family, 3)
    assert r1.coprime and r1.res_valuation == 2
    assert r2.coprime and r2.res_valuation == 6
    assert r3.coprime


def test_xi_coprimality_shared_factors():
    m167 = fam(C17, 3, d=-167)
    assert xi_coprimality(m167, 1) == Coprimality(
        coprime=False, multiplicity=1,
        certificate="exact division by xi_1 (1 times)")
    assert xi_coprimality(m167, 2).coprime

    m187 = fam(C17, 3, d=-187, depth=3)
    shared = xi_coprimality(m187, 1)
    assert not shared.coprime and shared.multiplicity == 1
    assert xi_coprimality(m187, 2).coprime

    # level-2 polynomial of the 73A twist is a constant times xi_1*xi_2
    m151 = fam(C73, 3, d=-151, depth=2)
    r2 = xi_coprimality(m151, 2)
    assert not r2.coprime and r2.multiplicity == 1


def test_xi_coprimality_input_validation():
    family = fam(C17, 3, d=373, depth=3)
    with pytest.raises(ValueError):
        xi_coprimality(family, 0)
    with pytest.raises(ValueError):
        xi_coprimality(family, 4)
    vanishing = fam(C14, 5, d=12, depth=3)
    with pytest.raises(ValueError):
        xi_coprimality(vanishing, 1)


# ---------------------------------------------------------------------------
# resultant valuations
# ---------------------------------------------------------------------------


def test_resultant_valuation_frozen_values():
    assert resultant_valuation(3, fam(C17, 3, d=373, depth=3).polys[1].coeffs, 1) == 2
    assert resultant_valuation(3, fam(C17, 3, d=373, depth=3).polys[2].coeffs, 2) == 6
    assert resultant_valuation(3, fam(C40, 3, d=-379).polys[1].coeffs, 1) == 4
    assert resultant_valuation(3, fam(C40, 3, d=-379).polys[2].coeffs, 2) == 10


def test_resultant_valuation_matches_forced_value_on_random_polys():
    import random

    rng = random.Random(71)
    for _ in range(50):
        p = rng.choice([3, 5])
        n = rng.choice([1, 2])
        deg_xi = p ** (n - 1) * (p - 1)
        mu = rng.randrange(3)
        lam = rng.randrange(deg_xi)
        deg = lam + rng.randrange(4)
        coeffs = []
        for i in range(deg + 1):
            if i < lam:
                coeffs.append(Fraction(p ** (mu + 1) * rng.randrange(-9, 10)))
            elif i == lam:
                unit = rng.choice([1, 2, 4, 5, 7, 8]) % p or 1
                coeffs.append(Fraction(p**mu * unit))
            else:
                coeffs.append(Fraction(p**mu * rng.randrange(-9, 10)))
        # dominant-term valuation: mu * deg(xi_n) + lam
        assert resultant_valuation(p, coeffs, n) == mu * deg_xi + lam


def test_resultant_valuation_rejects_zero_and_shared():
    with pytest.raises(ValueError):
        resultant_valuation(3, (Fraction(0),), 1)
    xi1 = [Fraction(c) for c in xi_poly(3, 1).fractions()]
    with pytest.raises(ValueError):
        resultant_valuation(3, xi1, 1)


def test_lambda_mu_additive_under_multiplication():
    import random

    rng = random.Random(9)

    def rand_poly(p):
        deg = rng.randrange(1, 5)
        coeffs = [Fraction(rng.randrange(-20, 21)) for _ in range(deg + 1)]
        if all(c == 0 for c in coeffs):
            coeffs[0] = Fraction(1)
        return coeffs

    from padiclf.padic import PadicPoly

    for _ in range(40):
        p = rng.choice([3, 5, 7])
        a, b = rand_poly(p), rand_poly(p)
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] += x * y
        pa = lambda_mu(PadicPoly.make(p, a))
        pb = lambda_mu(PadicPoly.make(p, b))
        pc = lambda_mu(PadicPoly.make(p, prod))
        if pa is None or pb is None:
            assert pc is None
        else:
            assert pc == (pa[0] + pb[0], pa[1] + pb[1])

"""Iwasawa invariants and Sha growth along the cyclotomic tower.

Each level polynomial of a :class:`~padiclf.lfunction.MazurTateFamily`
carries a pair ``(mu_n, lambda_n)``: the power of ``p`` dividing its
content and the index of the first coefficient realizing that minimum.
In the supersingular setting these pairs do not stabilize outright;
instead they stabilize *per parity* of the level, after subtracting a
universal staircase ``M_n`` that grows like ``p^n/(p+1)``.

This module extracts those stabilized invariants (:func:`profile`),
converts them into the closed-form exponent of the predicted
Tate-Shafarevich order over the n-th tower layer (:func:`sha_growth`,
:func:`growth_exponent`), and certifies whether each level polynomial
shares a factor with the new cyclotomic piece at its level
(:func:`xi_coprimality`).

Certification policy: a parity is declared stabilized only at a level
whose ``mu`` vanishes.  Once the content is a unit the continuation of
the lambda sequence is forced (``lambda_{n+2} = lambda_n + p^n(p-1)``),
so one such level suffices.  Matching ``(mu, lambda)`` data at two
levels with ``mu > 0`` is *not* accepted: the corpus contains families
whose even levels agree at depth 0 and 2 with ``mu = 1`` and still drop
to ``mu = 0`` at depth 4, which would silently certify a wrong
``lambda`` tilde.  Families whose content never reaches a unit within
the computed depth raise :class:`~padiclf.errors.DepthInsufficient`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .errors import DepthInsufficient, NotStabilized, UnsupportedPattern
from .lfunction import MazurTateFamily
from .padic import lambda_mu, poly_divmod, poly_trim, val_fraction, xi_poly

__all__ = [
    "Coprimality",
    "GrowthModel",
    "IwasawaProfile",
    "LevelRecord",
    "ShaGrowth",
    "growth_exponent",
    "growth_model",
    "lambda_floor",
    "profile",
    "profile_row",
    "resultant_valuation",
    "sha_growth",
    "xi_coprimality",
]


def lambda_floor(p: int, n: int) -> int:
    """The universal staircase M_n subtracted from lambda_n per parity.

    M_n = (p^n - 1)/(p + 1) for even n and (p^n - p)/(p + 1) for odd n;
    both are integers because p^2 = 1 mod (p + 1).
    """
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n % 2 == 0:
        return (p**n - 1) // (p + 1)
    return (p**n - p) // (p + 1)


@dataclass(frozen=True)
class LevelRecord:
    """Invariants of a single level polynomial.

    ``mu``/``lam`` are None exactly when the polynomial vanishes
    identically (``is_zero``), which encodes mu = +infinity.
    """

    n: int
    mu: Optional[int]
    lam: Optional[int]
    is_zero: bool

    def cell(self) -> str:
        """Table cell in `mu,lambda` form, `inf` for a vanishing level."""
        if self.is_zero:
            return "inf"
        return f"{self.mu},{self.lam}"


@dataclass(frozen=True)
class Coprimality:
    """Outcome of comparing a level polynomial with its cyclotomic piece.

    ``coprime`` is True when the polynomial shares no root with xi_n;
    otherwise ``multiplicity`` counts how many exact factors of xi_n
    divide it.  ``res_valuation`` is the p-adic valuation of the
    resultant of the unit part with xi_n when that resultant was
    computed (None when a cheaper certificate settled the question),
    and ``certificate`` names the deciding test.
    """

    coprime: bool
    multiplicity: int = 0
    res_valuation: Optional[int] = None
    certificate: str = ""


@dataclass(frozen=True)
class IwasawaProfile:
    """Per-level invariants plus their per-parity stabilized values.

    ``lam_tilde_plus``/``lam_tilde_minus`` are the stabilized lambda
    values after subtracting the staircase M_n (even / odd levels
    respectively); ``lam_plus``/``lam_minus`` are the rational
    invariants entering the growth formula, obtained by the constant
    shifts 1/(p+1) and p/(p+1).  ``onset_plus``/``onset_minus`` record
    the first level certifying each parity.  ``mu0`` is the content
    valuation of the level-0 value, None when that value vanishes
    (positive analytic rank).
    """

    p: int
    a_p: int
    depth: int
    levels: Tuple[LevelRecord, ...]
    mu0: Optional[int]
    mu_plus: int
    mu_minus: int
    lam_tilde_plus: int
    lam_tilde_minus: int
    lam_plus: Fraction
    lam_minus: Fraction
    onset_plus: int
    onset_minus: int
    floor_table: Tuple[int, ...]
    sign: Optional[int]

    def level(self, n: int) -> LevelRecord:
        return self.levels[n]

    def lam_tilde(self, parity: int) -> int:
        """Stabilized lambda tilde for even (0) or odd (1) levels."""
        return self.lam_tilde_minus if parity % 2 else self.lam_tilde_plus


def _certify_parity(
    p: int, records: Sequence[LevelRecord], parity: int
) -> Tuple[LevelRecord, List[LevelRecord]]:
    """First mu = 0 record of the given parity, plus all deeper ones."""
    cands = [r for r in records if r.n % 2 == parity and not r.is_zero]
    if not cands:
        raise DepthInsufficient(
            f"no nonvanishing level of parity {parity} within depth "
            f"{records[-1].n}; increase depth"
        )
    for i, rec in enumerate(cands):
        if rec.mu == 0:
            return rec, cands[i + 1 :]
    raise DepthInsufficient(
        f"content never reaches a unit on parity-{parity} levels up to "
        f"depth {records[-1].n}; stabilization cannot be certified"
    )


def profile(family: MazurTateFamily, sign: Optional[int] = None) -> IwasawaProfile:
    """Extract stabilized Iwasawa invariants from a polynomial family.

    Requires depth >= 2.  Raises DepthInsufficient when either parity
    never exhibits a unit content within the computed depth, and
    UnsupportedPattern when the certified data violates the structural
    constraints (lambda below the staircase, broken lambda progression
    on deeper certified levels, or unequal mu on the two parities while
    the trace of Frobenius is nonzero).
    """
    ctx = family.context
    p = ctx.p
    a_p = ctx.frob.a_p
    if family.depth < 2:
        raise DepthInsufficient("profiles require a family of depth >= 2")

    records: List[LevelRecord] = []
    for n, poly in enumerate(family.polys):
        pair = lambda_mu(poly)
        if pair is None:
            records.append(LevelRecord(n, None, None, True))
        else:
            records.append(LevelRecord(n, pair[0], pair[1], False))

    results = {}
    for parity in (0, 1):
        onset, deeper = _certify_parity(p, records, parity)
        tilde = onset.lam - lambda_floor(p, onset.n)
        if tilde < 0:
            raise UnsupportedPattern(
                f"lambda at level {onset.n} sits below the staircase "
                f"({onset.lam} < {lambda_floor(p, onset.n)})"
            )
        for rec in deeper:
            if rec.mu != 0 or rec.lam != onset.lam + (
                p**rec.n - p**onset.n
            ) // (p + 1):
                raise UnsupportedPattern(
                    f"level {rec.n} breaks the forced lambda progression "
                    f"after certification at level {onset.n}"
                )
        results[parity] = (onset, tilde)

    onset_plus, tilde_plus = results[0]
    onset_minus, tilde_minus = results[1]
    # mu at a certifying level is 0 by construction; a hypothetical
    # positive stabilized mu would have raised DepthInsufficient above.
    mu_plus = mu_minus = 0
    if a_p != 0 and mu_plus != mu_minus:
        raise UnsupportedPattern(
            "unequal stabilized mu on the two parities with nonzero trace"
        )

    lam_plus = Fraction(tilde_plus) - Fraction(1, p + 1)
    lam_minus = Fraction(tilde_minus) - Fraction(p, p + 1)
    assert (lam_plus + lam_minus).denominator == 1

    mu0 = records[0].mu
    inferred = sign
    if inferred is None and not records[0].is_zero:
        inferred = 1

    return IwasawaProfile(
        p=p,
        a_p=a_p,
        depth=family.depth,
        levels=tuple(records),
        mu0=mu0,
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        lam_tilde_plus=tilde_plus,
        lam_tilde_minus=tilde_minus,
        lam_plus=lam_plus,
        lam_minus=lam_minus,
        onset_plus=onset_plus.n,
        onset_minus=onset_minus.n,
        floor_table=tuple(lambda_floor(p, n) for n in range(family.depth + 1)),
        sign=inferred,
    )


def profile_row(prof: IwasawaProfile, tag: str = "") -> str:
    """One-line summary row: p | mu0 | level cells 1..4 | tag | l- | l+."""
    mu0 = "inf" if prof.mu0 is None else str(prof.mu0)
    cells = []
    for n in range(1, 5):
        cells.append(prof.levels[n].cell() if n <= prof.depth else "")
    return " | ".join(
        [str(prof.p), mu0, *cells, tag,
         str(prof.lam_tilde_minus), str(prof.lam_tilde_plus)]
    )


# ---------------------------------------------------------------------------
# Growth of the predicted Sha order along the tower
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthModel:
    """Stabilized data entering the closed-form growth exponent."""

    p: int
    mu_plus: Optional[int]
    mu_minus: Optional[int]
    lam_plus: Optional[Fraction]
    lam_minus: Optional[Fraction]


def growth_model(prof: IwasawaProfile) -> GrowthModel:
    return GrowthModel(
        p=prof.p,
        mu_plus=prof.mu_plus,
        mu_minus=prof.mu_minus,
        lam_plus=prof.lam_plus,
        lam_minus=prof.lam_minus,
    )


def growth_exponent(model: GrowthModel, n: int) -> int:
    """Closed-form exponent A_n; always an integer for stabilized data.

    A_n = mu+ (p^(2 floor(n/2)+1) - p)/(p+1)
        + mu- (p^(2 floor((n+1)/2)) - 1)/(p+1)
        + p (p^n - 1)/(p^2 - 1)
        + lam+ floor(n/2) + lam- floor((n+1)/2).
    """
    if n < 0:
        raise ValueError("tower layer must be nonnegative")
    if None in (model.mu_plus, model.mu_minus, model.lam_plus, model.lam_minus):
        raise NotStabilized("growth model is missing stabilized invariants")
    p = model.p
    h, h1 = n // 2, (n + 1) // 2
    total = Fraction(p ** (2 * h + 1) - p, p + 1) * model.mu_plus
    total += Fraction(p ** (2 * h1) - 1, p + 1) * model.mu_minus
    total += Fraction(p, p * p - 1) * (p**n - 1)
    total += model.lam_plus * h + model.lam_minus * h1
    if total.denominator != 1:
        raise NotStabilized(f"growth exponent at layer {n} is not integral")
    return int(total)


def resultant_valuation(p: int, coeffs: Sequence[Fraction], n: int) -> int:
    """p-adic valuation of res(P, xi_n) for P with rational coefficients.

    The coefficient denominators must be prime to p (they are 2-powers
    for every polynomial this package produces), so clearing them
    multiplies the resultant by a p-adic unit.
    """
    fr = [Fraction(c) for c in poly_trim(coeffs)]
    if not fr:
        raise ValueError("resultant of the zero polynomial")
    den = 1
    for c in fr:
        den = den * c.denominator // sympy.igcd(den, c.denominator)
    if den % p == 0:
        raise ValueError("coefficient denominators must be prime to p")
    ints = [int(c * den) for c in fr]
    x = sympy.Symbol("x")
    P = sympy.Poly(list(reversed(ints)), x)
    Q = sympy.Poly(list(reversed([int(c) for c in xi_poly(p, n).fractions()])), x)
    r = int(sympy.resultant(P, Q))
    if r == 0:
        raise ValueError("resultant vanishes: polynomial shares a root with xi_n")
    v = 0
    while r % p == 0:
        r //= p
        v += 1
    return v


def forced_resultant_valuation(p: int, n: int, mu: int, lam: int) -> Optional[int]:
    """Valuation of res(P, xi_n) forced by (mu, lambda) when lambda < deg xi_n.

    On the disc cut out by xi_n the term of index lambda dominates
    strictly, giving ord res = mu deg(xi_n) + lambda.  Returns None when
    lambda >= deg(xi_n) (no forced value; the resultant must be
    computed).
    """
    deg = p ** (n - 1) * (p - 1)
    if lam >= deg:
        return None
    return mu * deg + lam


def xi_coprimality(family: MazurTateFamily, n: int) -> Coprimality:
    """Decide whether level polynomial n shares a factor with xi_n.

    xi_n is irreducible over the rationals, so the polynomial either
    vanishes on the whole xi_n root disc (SharedFactor, with the exact
    multiplicity of division) or is coprime to it.  Coprimality is
    certified cheaply when the unit part has a unit remainder mod
    (xi_n, p); otherwise the resultant valuation is computed and, when
    lambda < deg xi_n, cross-checked against its forced value.
    """
    if not 1 <= n <= family.depth:
        raise ValueError("level must satisfy 1 <= n <= depth")
    poly = family.polys[n]
    pair = lambda_mu(poly)  # raises PrecisionTooLow on undecidable input
    if pair is None:
        raise ValueError(f"level-{n} polynomial vanishes; nothing to compare")
    mu, lam = pair
    p = family.context.p
    unit = [c / Fraction(p) ** mu for c in poly.coeffs]
    xi = xi_poly(p, n).fractions()

    multiplicity = 0
    current = list(poly_trim(unit))
    while True:
        quot, rem = poly_divmod(current, xi)
        if any(rem):
            break
        multiplicity += 1
        current = list(poly_trim(quot))
        if not current:
            break
    if multiplicity:
        return Coprimality(
            coprime=False,
            multiplicity=multiplicity,
            certificate=f"exact division by xi_{n} ({multiplicity} times)",
        )

    # monic divisor, p-integral coefficients: the remainder stays
    # p-integral, so reducing it mod p is legitimate
    if any(val_fraction(p, c) == 0 for c in rem):
        return Coprimality(
            coprime=True,
            certificate=f"remainder mod xi_{n} is a unit mod {p}",
        )

    res_val = resultant_valuation(p, unit, n)
    forced = forced_resultant_valuation(p, n, 0, lam)
    if forced is not None and res_val != forced:
        raise UnsupportedPattern(
            f"resultant valuation {res_val} contradicts the forced value "
            f"{forced} at level {n}"
        )
    return Coprimality(
        coprime=True,
        res_valuation=res_val,
        certificate=f"resultant with xi_{n} has finite valuation {res_val}",
    )


# ---------------------------------------------------------------------------
# Assembled Sha growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShaGrowth:
    """Predicted ord_p of the Sha order over each tower layer.

    For analytic rank 0 the exponents are absolute integers; for
    positive rank the leading contribution of the rank part is an
    uncomputed constant, so exponents are reported relative to a
    symbolic base ``nu`` and ``offset`` is None.  ``half_plus`` and
    ``half_minus`` are the coefficients of floor(n/2) and
    floor((n+1)/2) in the closed form (lambda+/- minus the rank
    deduction).  ``contributions`` lists (level, increment, running
    exponent) for the directly assembled low levels.
    """

    model: GrowthModel
    rank_term: int
    onset: int
    contributions: Tuple[Tuple[int, int, int], ...]
    offset: Optional[int]
    half_plus: Fraction
    half_minus: Fraction
    formula: str
    table: Dict[int, int]
    symbolic: bool


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _linear_formula(
    p: int, model: GrowthModel, half_plus: Fraction, half_minus: Fraction,
    offset: Optional[int], symbolic: bool,
) -> str:
    q = p * p - 1
    parts = [f"{p}({p}^n - 1)/{q}"]
    if model.mu_plus:
        parts.append(f"{model.mu_plus}({p}^(2*floor(n/2)+1) - {p})/{p + 1}")
    if model.mu_minus:
        parts.append(f"{model.mu_minus}({p}^(2*floor((n+1)/2)) - 1)/{p + 1}")
    if half_plus:
        parts.append(f"({_format_coeff(half_plus)})*floor(n/2)")
    if half_minus:
        parts.append(f"({_format_coeff(half_minus)})*floor((n+1)/2)")
    if symbolic:
        parts.append("nu")
    elif offset:
        parts.append(str(offset))
    return " + ".join(parts)


def sha_growth(
    prof: IwasawaProfile,
    family: MazurTateFamily,
    rank_s: int = 0,
    low_depth: int = 2,
) -> ShaGrowth:
    """Assemble the tower growth law for the predicted Sha order.

    Levels 1..low_depth contribute the computed valuation of
    res(P_n, xi_n) on top of the level-0 content; beyond that the
    stabilized closed form takes over, shifted so the two agree at
    low_depth.  With rank_s > 0 the level-0 value vanishes and every
    layer loses rank_s to the rank part, so the law is emitted relative
    to a symbolic constant nu.
    """
    if low_depth < 2:
        raise ValueError("low_depth must be at least 2")
    if low_depth > family.depth:
        raise DepthInsufficient(
            f"low_depth {low_depth} exceeds family depth {family.depth}"
        )
    if rank_s < 0:
        raise ValueError("rank deduction must be nonnegative")
    model = growth_model(prof)
    p = prof.p

    if rank_s == 0:
        if prof.mu0 is None:
            raise UnsupportedPattern(
                "level-0 value vanishes; a positive rank deduction is required"
            )
        running = prof.mu0
        contributions = [(0, prof.mu0, running)]
        for j in range(1, low_depth + 1):
            inc = resultant_valuation(p, family.polys[j].coeffs, j)
            running += inc
            contributions.append((j, inc, running))
        offset = running - growth_exponent(model, low_depth)
        half_plus, half_minus = prof.lam_plus, prof.lam_minus
        table = {n: e for n, _, e in contributions[: low_depth + 1]}
        for n in range(low_depth, family.depth + 1):
            table[n] = growth_exponent(model, n) + offset
        unit_case = (
            prof.mu_plus == 0
            and prof.mu_minus == 0
            and prof.lam_tilde_plus == 0
            and prof.lam_tilde_minus == 0
            and offset == 0
        )
        if unit_case:
            formula = f"floor({p}^(n+1)/{p * p - 1} - n/2)"
            for n in range(0, max(family.depth, 12) + 1):
                expected = (p ** (n + 1) * 2 - n * (p * p - 1)) // (
                    2 * (p * p - 1)
                )
                assert growth_exponent(model, n) == expected
        else:
            formula = _linear_formula(p, model, half_plus, half_minus, offset, False)
        return ShaGrowth(
            model=model,
            rank_term=0,
            onset=low_depth,
            contributions=tuple(contributions),
            offset=offset,
            half_plus=half_plus,
            half_minus=half_minus,
            formula=formula,
            table=table,
            symbolic=False,
        )

    # positive rank: exponents relative to the symbolic rank constant
    half_plus = prof.lam_plus - rank_s
    half_minus = prof.lam_minus - rank_s
    base = growth_exponent(model, low_depth) - rank_s * low_depth
    table = {
        n: growth_exponent(model, n) - rank_s * n - base
        for n in range(low_depth, family.depth + 1)
    }
    formula = _linear_formula(p, model, half_plus, half_minus, None, True)
    return ShaGrowth(
        model=model,
        rank_term=rank_s,
        onset=low_depth,
        contributions=(),
        offset=None,
        half_plus=half_plus,
        half_minus=half_minus,
        formula=formula,
        table=table,
        symbolic=True,
    )

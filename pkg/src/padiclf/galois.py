"""Certifying that the mod-p torsion representation is full.

For a curve with supersingular reduction at p, the image of the mod-p
Galois representation is either all of GL2(Z/p) or contained in the
normalizer of a non-split Cartan subgroup.  Four elementary criteria
(plus a semistable-twist argument for p >= 7) certify fullness from
readily computable data; none of them can certify the opposite, so the
only outcomes are ``Surjective`` (with every fired criterion and its
witness) and ``Inconclusive``.

The criteria, evaluated in order:

1. p = 3 and the discriminant is not a perfect cube (witness: a prime
   whose exponent in Delta is not divisible by 3).  Cubeness does not
   depend on the chosen model: rescaling multiplies Delta by a 12th
   power, which is a cube.
2. p >= 5 and the conductor is squarefree.
3. some prime exactly dividing the conductor has ord_l(j) not
   divisible by p.
4. p >= 5 and some good prime l has a_l nonzero mod p with
   a_l^2 - 4l a nonzero quadratic residue mod p (Frobenius then lies
   outside every Cartan normalizer).
5. p >= 7 and the curve is a quadratic twist of a semistable curve by
   a discriminant prime to p times that conductor.

Criterion 4 is provably vacuous at p = 3: a_l^2 - 4l = 1 (mod 3) would
force l = 0 (mod 3).  Genuinely non-full supersingular curves exist
(image inside a non-split Cartan normalizer) and stay Inconclusive
here; deciding non-fullness needs torsion-field computations that are
out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import factorint

from .curves import Curve, is_supersingular, kronecker, trace_of_frobenius
from .errors import BadReduction, NotSupersingular

__all__ = ["FiredCriterion", "SurjectivityVerdict", "serre_check"]


@dataclass(frozen=True)
class FiredCriterion:
    """A fullness criterion that applied, with its numeric witness."""

    name: str
    witness: Dict[str, int]
    statement: str


@dataclass(frozen=True)
class SurjectivityVerdict:
    status: str  # "Surjective" | "Inconclusive"
    reasons: Tuple[FiredCriterion, ...]
    scanned_bound: int
    notes: Tuple[str, ...] = field(default=())

    @property
    def surjective(self) -> bool:
        return self.status == "Surjective"


def serre_check(
    curve: Curve,
    p: int,
    l_bound: int = 1000,
    *,
    twist_parent: Optional[Curve] = None,
    twist_disc: Optional[int] = None,
) -> SurjectivityVerdict:
    """Evaluate the fullness criteria for the mod-p representation.

    All criteria are evaluated (not just the first to fire), so the
    verdict doubles as a record of every certificate available.  When
    the curve was built as a quadratic twist the parent is read off the
    curve itself; ``twist_parent``/``twist_disc`` override that for
    models constructed by hand.
    """
    if curve.conductor is None:
        raise ValueError("fullness criteria need the conductor")
    if not is_supersingular(curve, p):
        raise NotSupersingular(f"{curve.display()} is not supersingular at {p}")

    reasons: List[FiredCriterion] = []
    notes: List[str] = []
    conductor_exp = _factor_exponents(curve.conductor)

    # (1) discriminant not a cube (p = 3 only)
    if p == 3:
        witness = None
        for q, e in sorted(_factor_exponents(curve.discriminant).items()):
            if e % 3:
                witness = (q, e)
                break
        if witness is not None:
            q, e = witness
            reasons.append(
                FiredCriterion(
                    name="discriminant-not-a-cube",
                    witness={"q": q, "ord_delta": e},
                    statement=(
                        f"ord_{q}(Delta) = {e} is not divisible by 3, "
                        "so Delta is not a cube"
                    ),
                )
            )
        else:
            notes.append("discriminant is a perfect cube; criterion 1 cannot fire")

    # (2) squarefree conductor (p >= 5)
    if p >= 5 and all(e == 1 for e in conductor_exp.values()):
        reasons.append(
            FiredCriterion(
                name="squarefree-conductor",
                witness={"conductor": curve.conductor},
                statement=f"conductor {curve.conductor} is squarefree and p >= 5",
            )
        )

    # (3) multiplicative prime with j-valuation prime to p
    j = curve.j_invariant
    for ell in sorted(q for q, e in conductor_exp.items() if e == 1):
        v = _val(j.numerator, ell) - _val(j.denominator, ell)
        if v % p:
            reasons.append(
                FiredCriterion(
                    name="multiplicative-j-valuation",
                    witness={"l": ell, "ord_j": v},
                    statement=(
                        f"{ell} exactly divides the conductor and "
                        f"ord_{ell}(j) = {v} is not divisible by {p}"
                    ),
                )
            )
            break

    # (4) split Frobenius witness (p >= 5; provably vacuous at p = 3)
    if p >= 5:
        for ell in _small_primes(l_bound):
            if (curve.conductor * p) % ell == 0:
                continue
            try:
                a = trace_of_frobenius(curve, ell)
            except BadReduction:
                continue  # model defective at a good prime; skip it
            d = a * a - 4 * ell
            if a % p and d % p and kronecker(d, p) == 1:
                reasons.append(
                    FiredCriterion(
                        name="split-frobenius",
                        witness={"l": ell, "a_l": a},
                        statement=(
                            f"a_{ell} = {a} is nonzero mod {p} and "
                            f"a_{ell}^2 - 4*{ell} is a nonzero quadratic "
                            f"residue mod {p}"
                        ),
                    )
                )
                break

    # (5) twist of a semistable curve (p >= 7)
    if twist_parent is None and twist_disc is None and curve.twist_of is not None:
        twist_parent, twist_disc = curve.twist_of
    if p >= 7 and twist_parent is not None and twist_disc is not None:
        parent_n = twist_parent.conductor
        if parent_n is None:
            notes.append("twist parent lacks a conductor; criterion 5 skipped")
        else:
            semistable = all(
                e == 1 for e in _factor_exponents(parent_n).values()
            )
            coprime = _gcd(twist_disc, p * parent_n) == 1
            if semistable and coprime and is_supersingular(twist_parent, p):
                reasons.append(
                    FiredCriterion(
                        name="semistable-twist",
                        witness={"parent_conductor": parent_n, "d": twist_disc},
                        statement=(
                            f"quadratic twist of the semistable curve of "
                            f"conductor {parent_n} by {twist_disc}, prime to "
                            f"{p}*{parent_n}, with p >= 7"
                        ),
                    )
                )

    status = "Surjective" if reasons else "Inconclusive"
    if status == "Inconclusive":
        notes.append(
            "no criterion fired: the image is full or a non-split Cartan "
            "normalizer, and this check never certifies the latter"
        )
    return SurjectivityVerdict(
        status=status,
        reasons=tuple(reasons),
        scanned_bound=l_bound,
        notes=tuple(notes),
    )


def _factor_exponents(n: int) -> Dict[int, int]:
    return {int(q): int(e) for q, e in factorint(abs(n)).items()}


def _small_primes(bound: int) -> List[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for q in range(2, int(bound**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = b"\x00" * len(sieve[q * q :: q])
    return [q for q in range(2, bound + 1) if sieve[q]]


def _val(n: int, q: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = abs(n)
    while n % q == 0:
        n //= q
        v += 1
    return v


def _gcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a

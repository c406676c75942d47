"""Exception hierarchy for the padiclf package.

Every failure mode that callers are expected to handle has its own class so
that CLI exit-code mapping and tests can dispatch on type alone.
"""
from __future__ import annotations


class PadiclfError(Exception):
    """Base class for all package-specific errors."""


class SingularCurve(PadiclfError):
    """The Weierstrass equation has discriminant zero."""


class BadReduction(PadiclfError):
    """Point counting was requested at a prime dividing the discriminant."""


class NotSupersingular(PadiclfError):
    """The trace of Frobenius at p is not divisible by p."""


class InvalidDiscriminant(PadiclfError):
    """A quadratic twist was requested for a non-fundamental or non-coprime D."""


class TorsionPoint(PadiclfError):
    """A p-adic point logarithm was requested for a torsion point."""


class PrecisionExhausted(PadiclfError):
    """A numeric routine could not reach the requested working precision."""


class EigenspaceNotCutOut(PadiclfError):
    """Hecke operators up to the search bound failed to isolate a line."""


class NormalizationAmbiguous(PadiclfError):
    """The period normalization of a symbol space could not be pinned down."""


class BadLevel(PadiclfError):
    """A Hecke operator was requested at a prime dividing the level."""


class PrecisionTooLow(PadiclfError):
    """All coefficients vanish to the working precision; invariants undefined."""


class ZeroDivisor(PadiclfError):
    """A resultant against a cyclotomic factor collapsed to zero."""


class RecurrenceViolated(PadiclfError):
    """The three-term family recurrence failed at some level.

    Attributes:
        level: the index at which the congruence failed.
    """

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"family recurrence failed at level {level}")


class OrderNotCertified(PadiclfError):
    """Lower-order derivative values could not be certified to vanish."""


class DepthInsufficient(PadiclfError):
    """Stabilization of the invariant sequence needs more levels."""


class UnsupportedPattern(PadiclfError):
    """The invariant pattern falls outside the supported classification."""


class NotStabilized(PadiclfError):
    """A growth formula was requested before the profile stabilized."""


class InsufficientData(PadiclfError):
    """A consistency check was invoked without the inputs it needs."""


class ParseError(PadiclfError):
    """A curve table line could not be parsed.

    Attributes:
        line: 1-based line number in the input.
        reason: human-readable description of the problem.
    """

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")

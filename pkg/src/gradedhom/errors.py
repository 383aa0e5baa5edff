"""Exception types raised by the engine."""

from __future__ import annotations


class GradedHomError(Exception):
    """Base class for every error raised by this package."""


class ZeroInverse(GradedHomError, ZeroDivisionError):
    pass


class NotPrime(GradedHomError, ValueError):
    pass


class NotHomogeneous(GradedHomError, ValueError):
    pass


class UnitIdeal(GradedHomError, ValueError):
    pass


class BadOrder(GradedHomError, ValueError):
    pass


class RankMismatch(GradedHomError, ValueError):
    pass


class RingMismatch(GradedHomError, ValueError):
    pass


class NotExact(GradedHomError, ValueError):
    pass


class NotWellDefined(GradedHomError, ValueError):
    """A matrix does not induce a map between the given presentations."""


class UncertifiedDualizer(GradedHomError, ValueError):
    pass


class ABViolation(GradedHomError, RuntimeError):
    """The Auslander-Buchsbaum cross-check failed: an engine bug, not bad input."""


class ZeroModule(GradedHomError, ValueError):
    pass


class ParseError(GradedHomError, ValueError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class BadDeclaration(GradedHomError, ValueError):
    """A user declaration contradicts what can be computed (e.g. a false inclusion)."""

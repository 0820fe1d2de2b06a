"""Exception types shared across the package."""

from __future__ import annotations


class HeckeDominanceError(Exception):
    """Base class for all errors raised by this package."""


class TruncationMismatch(HeckeDominanceError, ValueError):
    """Binary q-series operation on operands with different truncation orders."""


class UnsupportedRecipe(HeckeDominanceError, ValueError):
    pass


class BadPrimeError(HeckeDominanceError, ValueError):
    """A good-prime-only formula was applied at a prime dividing the level."""


class AuditError(HeckeDominanceError):
    """An eigenvalue table violates a Hecke identity.

    ``report`` carries the :class:`~hecke_dominance.catalog.AuditReport`
    with the first counterexample.
    """

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class TableFormatError(HeckeDominanceError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class HypothesisError(HeckeDominanceError):
    """A pair of forms does not satisfy the hypotheses required for a check."""


class CMInconclusive(HeckeDominanceError):
    """Zero-fraction of a(p) falls between the CM and non-CM thresholds."""

    def __init__(self, fraction: float, X: int):
        super().__init__(
            f"zero fraction {fraction:.4f} at X={X} is inconclusive; use a larger X"
        )
        self.fraction = fraction
        self.X = X

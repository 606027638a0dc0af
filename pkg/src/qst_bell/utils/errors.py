"""Exception hierarchy for qst-bell.

Every error raised on purpose by the package derives from QstBellError so the
CLI can map it to an exit code without catching unrelated failures.
"""

from __future__ import annotations


class QstBellError(Exception):
    """Base class for all qst-bell errors."""


class DimensionError(QstBellError, ValueError):
    """Operands have incompatible dimensions."""


class DomainError(QstBellError, ValueError):
    """An argument lies outside the domain of the operation (d < 2, bad index, ...)."""


class CapacityError(QstBellError):
    """A requested size exceeds a configured cap."""


class ValidationError(QstBellError):
    """A numerical invariant was violated (non-Hermitian input, failed convergence, ...)."""


class DegenerateInputError(QstBellError, ValueError):
    """The inputs admit no well-defined result (e.g. the superposition of psi and -psi)."""

"""Exception hierarchy shared by the library, the service and the CLI.

Exit-code contract: 0 success, 1 usage, 2 parse error, 3 math-domain error,
4 internal inconsistency.
"""
from __future__ import annotations


class CRFlatError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class UsageError(CRFlatError):
    """Bad invocation: unknown flags, missing files, invalid parameter combos."""

    exit_code = 1


class MapParseError(CRFlatError):
    """Map-spec or automorphism document is malformed."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.line = line
        self.col = col


class DimensionError(MapParseError):
    """Component count or variable usage inconsistent with declared dimensions."""


class MathDomainError(CRFlatError):
    """A computation left its domain of validity (pole, degenerate chart, ...)."""

    exit_code = 3


class PoleError(MathDomainError):
    """Denominator vanishes at the requested point."""


class SingularSubstitutionError(MathDomainError):
    """Substitution would invert a jet whose constant term is zero."""


class ChartError(MathDomainError):
    """Chart assumption failed (degenerate (f,g)-Jacobian, point at infinity, ...)."""


class PointAtInfinityError(ChartError):
    """Projective action landed outside the affine chart."""


class DegenerateFrameError(MathDomainError):
    """Frame construction met a degenerate Reeb pairing or rank deficiency."""


class NormalizationError(MathDomainError):
    """A normalization stage could not reach its normal form."""


class JetOrderError(MathDomainError):
    """An operation would need jet coefficients beyond the truncation order."""


class InconsistencyError(CRFlatError):
    """Two independent computations of the same quantity disagree."""

    exit_code = 4

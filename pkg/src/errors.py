"""
Exception hierarchy for the hermite-kinetics toolkit.

Every error raised on purpose by the library derives from HermiteKineticsError,
so the CLI can map failures onto exit codes without inspecting messages:

    ConfigError       -> exit 2 (unreadable file, unknown key, bad literal)
    ValidationError   -> exit 3 (well-formed value that violates a constraint)
    SolverError       -> exit 4 (nonconvergence, singular update)

Numerical preconditions on library operations raise the ValueError subclasses
below, so plain `except ValueError` keeps working for callers that don't care
about the categories.
"""
from __future__ import annotations


class HermiteKineticsError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


# =============================================================================
# Configuration / CLI
# =============================================================================


class ConfigError(HermiteKineticsError):
    """A config file or override could not be read or parsed."""

    exit_code = 2


class ValidationError(HermiteKineticsError, ValueError):
    """A parsed configuration violates a constraint (e.g. k > N, nu <= 0)."""

    exit_code = 3


class SnapshotFormatError(ConfigError):
    """A file that does not hold a coefficient snapshot."""


# =============================================================================
# Numerical preconditions
# =============================================================================


class BasisMismatchError(ValueError):
    """Operands live on different bases or truncations."""


class UnsupportedBasisError(ValueError):
    """Operation is not defined for this basis family."""


class UnsupportedOrderError(ValueError):
    """Operation is only available for a specific operator order k."""


class InsufficientQuadratureError(ValueError):
    """Quadrature rule has too few nodes for the requested truncation."""


class HermiteOverflowError(OverflowError):
    """A factorial-bearing constant left the double-precision range."""


# =============================================================================
# Solver failures
# =============================================================================


class SolverError(HermiteKineticsError):
    """Time stepping failed."""

    exit_code = 4


class SingularUpdateError(SolverError):
    """The implicit update matrix is singular."""


class PicardNonConvergenceError(SolverError):
    """Fixed-point iteration did not reach the tolerance."""

    def __init__(self, iterations: int, residual: float, tolerance: float):
        self.iterations = iterations
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"Picard iteration did not converge after {iterations} iterations "
            f"(last residual {residual:.3e}, tolerance {tolerance:.3e})"
        )

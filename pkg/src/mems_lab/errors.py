"""Exception taxonomy shared across the package."""


class MemsLabError(Exception):
    """Base class for all package errors."""


class DomainError(MemsLabError, ValueError):
    """Nonlinearity evaluated outside [0, 1) or past the overflow guard."""


class InvalidCenter(MemsLabError, ValueError):
    """Shooting requested from a center value outside [0, 1)."""


class IntegrationError(MemsLabError, RuntimeError):
    """Base class for integrator failures."""


class StepSizeUnderflow(IntegrationError):
    """Step controller drove the step below 1e-15 (near-singular dynamics)."""


class StepLimitExceeded(IntegrationError):
    """Integration exceeded the configured step budget."""


class ProfileRangeError(MemsLabError, ValueError):
    """Profile evaluated or integrated outside [0, r_end]."""


class ProfileInvariantViolation(MemsLabError, RuntimeError):
    """A freshly integrated profile failed its structural invariants."""


class NoZeroCrossing(MemsLabError, RuntimeError):
    """Free shooting ended without u reaching zero (blow-up or max radius)."""


class NotBracketed(MemsLabError, RuntimeError):
    """Root not bracketed on the minimal branch."""


class BracketExhausted(MemsLabError, RuntimeError):
    """Eigenvalue bisection bracket does not contain the principal eigenvalue."""


class EmptyDiagram(MemsLabError, RuntimeError):
    """No center value in the sweep grid produced a unit-ball solution."""


class DimensionOutOfRange(MemsLabError, ValueError):
    """Operation restricted to dimensions 2..6 called outside that range."""

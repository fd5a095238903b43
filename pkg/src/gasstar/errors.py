"""Exception types shared across the package.

Domain/usage problems derive from ValueError so they behave like ordinary
argument errors; numerical failures derive from RuntimeError so callers can
tell "you asked for something invalid" apart from "the computation broke".
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A supplied specification (EOS, run config) is unusable."""


class MassMismatchError(ValueError):
    """Two states that must share the same total mass do not."""


class NonConvexError(ValueError):
    """Sampled function violates the convexity required for conjugation."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or lost validity."""


class InfiniteRadiusError(NumericalError):
    """Outward integration never reached a surface: no compact support."""


class MassUnreachableError(NumericalError):
    """Mass matching could not bracket the target mass."""

    def __init__(self, message, scan_table=None):
        super().__init__(message)
        self.scan_table = scan_table


class LiftMismatchError(NumericalError):
    """Velocity-space integral of a lifted state fails to reproduce rho0."""


class HydroAbort(NumericalError):
    """Time integration aborted (NaN or negative pressure detected)."""

    def __init__(self, message, state=None, ledger=None, metrics=None):
        super().__init__(message)
        self.state = state
        self.ledger = ledger
        self.metrics = metrics

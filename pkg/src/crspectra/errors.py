"""Exception and warning types raised across the package."""


class CRError(Exception):
    """Base class for every error raised by crspectra."""


class PoleError(CRError, ValueError):
    pass


class DomainError(CRError, ValueError):
    pass


class EmptySpectrumError(CRError, ValueError):
    pass


class InvalidLabelsError(CRError, ValueError):
    """Quantum numbers that violate the branching rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotApplicableError(CRError):
    pass


class ForwardSingularityError(CRError, ValueError):
    pass


class KappaNotZeroError(CRError, ValueError):
    pass


class QuadratureNotConverged(CRError, RuntimeError):
    pass


class FootprintError(CRError, ValueError):
    pass


class SingularMarginError(CRError, ValueError):
    pass


class NoConvergence(CRError, RuntimeError):
    pass


class AsymptoticRegionTooSmall(CRError, RuntimeError):
    pass


class TruncationWarning(UserWarning):
    """Raised (as a warning) when an extrapolated series has not settled."""

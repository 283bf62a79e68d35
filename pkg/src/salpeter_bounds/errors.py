"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class CouplingTooLargeError(DomainError):
    """Coulomb coupling a(-1)/beta is not below 1/2."""


class NoDiscreteSpectrumError(DomainError):
    """The requested Hamiltonian has no discrete ground state."""


class UnsupportedTermError(DomainError):
    """A power term that the requested bound cannot handle."""


class BracketError(ValueError):
    """Bracket does not enclose an interior minimum."""


class UnboundedObjectiveError(RuntimeError):
    """Bracket expansion failed to find a finite interior minimum."""


class ConfigurationError(ValueError):
    """Inconsistent inputs, e.g. a missing P-factor for a present term."""


class InvalidCurveError(ValueError):
    """A coupling curve that violates monotonicity or concavity."""

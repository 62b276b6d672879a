"""Exception hierarchy shared by all dipmag modules."""


class DipmagError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DipmagError, ValueError):
    """A parameter violates a model invariant."""


class ConvergenceError(DipmagError):
    """A lattice sum did not reach the requested tolerance."""


class BoundaryError(DipmagError):
    """Parameters sit exactly on the OOP FM / IP AFM boundary."""


class NoBoundaryError(DipmagError):
    """No phase change exists inside the searched separation bracket."""


class PhaseMismatchError(DipmagError):
    """The requested phase is not the classical ground state."""


class SizeError(DipmagError):
    """Lattice too large for the dense real-space construction."""


class InstabilityError(DipmagError):
    """A magnon energy became imaginary (softening beyond the phase change)."""


class GaplessError(DipmagError):
    """A magnon energy is too close to zero for a finite Bogoliubov matrix."""


class NotPositiveDefinite(DipmagError):
    """The bosonic Hamiltonian matrix is not positive definite."""


class LogBranchError(DipmagError):
    """The matrix has an eigenvalue on the branch cut of the logarithm."""


class ProjectionError(DipmagError):
    """The matrix logarithm does not lie in the four-generator subalgebra."""


class NumericalError(DipmagError):
    """Non-physical numerical input (e.g. unpaired symplectic spectrum)."""


class ConfigError(DipmagError):
    """Malformed or inconsistent sweep configuration."""

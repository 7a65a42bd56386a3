"""Exception and warning types shared across the package."""


class BundlerError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(BundlerError, ValueError):
    """Operator or state dimensions are inconsistent."""


class DegenerateBasisError(BundlerError, ValueError):
    """Dressed basis undefined: drive and detuning both vanish."""


class UnsupportedFrameError(BundlerError, ValueError):
    """Requested Hamiltonian frame is unavailable for these parameters."""


class SteadyStateError(BundlerError, RuntimeError):
    """Steady-state solve failed; message carries a conditioning report."""


class NonUniqueSteadyStateError(SteadyStateError):
    """The Liouvillian null space is degenerate."""


class TruncationOverflowError(BundlerError, RuntimeError):
    """Fock truncation search exceeded the hard cap."""


class DecompositionError(BundlerError, RuntimeError):
    """Liouvillian eigendecomposition is numerically defective."""


class ManifoldDegeneracyError(BundlerError, RuntimeError):
    """An intermediate dressed level crosses the target manifold."""


class IntegrationError(BundlerError, RuntimeError):
    """A quadrature failed to converge within its window."""


class InvalidOrderError(BundlerError, ValueError):
    """Multiphoton order outside the supported range."""


class ConfigError(BundlerError, ValueError):
    """Invalid scenario configuration."""


class ValidityWarning(UserWarning):
    """Parameters lie outside the stated validity regime of a formula."""

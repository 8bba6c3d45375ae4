"""Exception types raised across the package."""


class RFTopoError(Exception):
    """Base class for package errors."""


class InvalidProfileError(RFTopoError, ValueError):
    """An initial profile violates positivity, slope or pole requirements."""


class SolverFailureError(RFTopoError):
    """Newton iteration for the pole constants did not converge."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class BracketingError(RFTopoError, ValueError):
    """No sign change in the bracket handed to a bisection."""


class DegenerateStateError(RFTopoError, FloatingPointError):
    """A radial field reached zero or became non-finite."""


class StiffnessError(RFTopoError):
    """The explicit step violates the parabolic stability guard."""


class InsufficientDataError(RFTopoError, ValueError):
    """Too few diagnostic samples to classify a singularity."""


class IllPosedFiltrationError(RFTopoError, ValueError):
    """A simplex below the filtration dimension has no coface to inherit from."""


class FiltrationValidationError(RFTopoError, ValueError):
    """A face appears after one of its cofaces, or values are not finite."""


class OrderingError(RFTopoError, ValueError):
    """Boundary-matrix input is not in a face-respecting order."""


class OutOfDomainError(RFTopoError, ValueError):
    """A mesh coordinate lies outside the sampled solver domain."""

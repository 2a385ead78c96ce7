"""Exception hierarchy.  Every domain failure derives from :class:`HLRSError`."""


class HLRSError(Exception):
    """Base class for library errors."""


class ParameterError(HLRSError, ValueError):
    """A model parameter is outside its validity window."""


class DomainError(HLRSError, ValueError):
    """A function was evaluated at a pole or outside its domain."""


class UnsupportedParameterError(HLRSError, ValueError):
    """Parameter combination not covered by the implemented branches."""


class LeRoyRangeError(HLRSError, ArithmeticError):
    """Le Roy series argument too large for a trustworthy double-precision sum."""


class NonIntegrableError(HLRSError, ArithmeticError):
    """Quadrature detected a divergent integral."""


class QuadratureError(HLRSError, ArithmeticError):
    """Quadrature failed to converge."""


class NumericalPSDError(HLRSError, ArithmeticError):
    """Covariance matrix factorization failed even with the maximum jitter."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (min eigenvalue estimate {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class MixingLawError(HLRSError, RuntimeError):
    """The Le Roy mixing law was requested before being built, or failed certification."""


class TruncationError(HLRSError, ArithmeticError):
    """Inverse Mellin integrand tail did not decay within the allowed window."""

"""Exception hierarchy shared by all modules."""


class QiopaError(Exception):
    """Base class for package errors."""


class ConfigError(QiopaError, ValueError):
    """Invalid parameters or configuration."""


class UnsupportedInputError(ConfigError):
    """The requested closed form is outside the supported orders."""


class NumericalError(QiopaError, ArithmeticError):
    """A numerical computation failed or lost too much accuracy."""


class TruncationError(NumericalError):
    """A Fock-space truncation could not meet the requested deficit.

    Attributes
    ----------
    deficit : float
        The truncation deficit actually achieved, ``1 - sum |amp|^2``.
    """

    def __init__(self, message, deficit):
        super().__init__(message)
        self.deficit = deficit


class DegenerateFilterError(NumericalError):
    """A projection left a state with (numerically) zero trace."""


class InvalidStateError(NumericalError):
    """A density matrix has eigenvalues too negative to be a physical state."""

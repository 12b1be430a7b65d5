"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: validation errors exit with 2,
size-guard violations with 3, numerical failures with 4.
"""


class KnapannealError(Exception):
    """Base class for all package errors."""


class ValidationError(KnapannealError, ValueError):
    """An input violates a documented invariant or precondition."""


class SizeLimitError(KnapannealError):
    """A resource guard was hit (enumeration or qubit-count limit)."""


class NumericalError(KnapannealError):
    """A numerical routine failed to meet its accuracy contract."""


class GapScanError(NumericalError):
    """The iterative eigensolver did not converge at some schedule point."""


class StepSizeError(NumericalError):
    """Time integration lost too much norm; a smaller step is required."""


class InfeasibleEncodingWarning(UserWarning):
    """The penalty encoding of this instance has no zero-penalty configuration.

    Raised when no single item fits the capacity (min weight > W): the slack
    register then cannot be made consistent with any item selection, so every
    binary configuration pays a constraint penalty.
    """

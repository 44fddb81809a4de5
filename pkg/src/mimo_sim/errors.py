"""Exception types shared across the simulator."""


class MimoSimError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(MimoSimError):
    """Operands have incompatible or unexpected shapes."""


class DimensionalityViolationError(MimoSimError):
    """A system dimension constraint is violated (e.g. more streams than transmit antennas)."""


class RankDeficientError(MimoSimError):
    """A matrix that must have full rank does not."""


class SingularMatrixError(MimoSimError):
    """A matrix inversion or solve encountered a (numerically) singular matrix."""


class NotUnimodularError(MimoSimError):
    """A transform that must be unimodular (Gaussian-integer, unit-modulus determinant) is not."""


class DegenerateInputError(MimoSimError):
    """An input is degenerate for the requested operation (e.g. an all-zero precoder)."""


class InfeasibleError(MimoSimError):
    """The requested system configuration admits no valid stream allocation."""


class SingularIterateError(MimoSimError):
    """An iterative solver hit a singular iterate twice in a row and cannot continue."""


class NonTerminatingError(MimoSimError):
    """An iterative routine exceeded its elementary-operation budget."""


class ConfigurationError(MimoSimError):
    """A simulation configuration is invalid."""

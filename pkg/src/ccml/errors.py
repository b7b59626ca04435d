"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError and subclasses / ShapeError -> 3, TrainingDivergedError -> 4.
"""


class CcmlError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CcmlError):
    """Invalid parameter value or inconsistent option combination."""


class ShapeError(CcmlError):
    """Operands have incompatible dimensions."""


class DataError(CcmlError):
    """Input data violates a precondition (empty, non-finite, wrong labels...)."""


class ParseError(DataError):
    """A file could not be parsed; message carries the offending row."""


class FeasibilityError(DataError):
    """A neighbour query cannot be satisfied (class too small for k)."""


class DegenerateDataError(DataError):
    """Data has no usable structure (e.g. zero variance)."""


class ModelFormatError(DataError):
    """Model file is malformed or has an unsupported format version."""


class TrainingDivergedError(CcmlError):
    """Objective became non-finite during training."""

    def __init__(self, step: int, learning_rate: float):
        self.step = step
        self.learning_rate = learning_rate
        super().__init__(
            f"objective became non-finite at step {step} "
            f"(learning_rate={learning_rate:g}); lower the learning rate"
        )

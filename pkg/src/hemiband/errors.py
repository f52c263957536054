"""Exception hierarchy. Validation-type errors map to CLI exit 1, the rest to exit 2."""


class HemibandError(Exception):
    """Base class for all package errors."""


class ValidationError(HemibandError):
    """Caller supplied an invalid argument, configuration, or file."""


class DimensionError(ValidationError):
    """Array shapes do not compose."""


class FormatError(ValidationError):
    """A data file violates the corpus format. Message names file and line."""


class UnknownChannelError(ValidationError):
    """Channel label does not end in a recognized reference suffix."""


class DegenerateBatchError(ValidationError):
    """Batch statistics are undefined for the given batch size."""


class StateError(HemibandError):
    """Operation called out of order (e.g. backward without a matching forward)."""


class NumericError(HemibandError):
    """Non-finite values where finite ones are required."""


class TrainingDivergedError(NumericError):
    """Loss became non-finite during training; message carries epoch/batch/loss."""

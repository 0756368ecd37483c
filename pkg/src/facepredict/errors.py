"""Exception types raised across the face prediction pipeline."""


class FpmError(Exception):
    """Base class for pipeline errors."""


class NameParseError(FpmError, ValueError):
    pass


class EmptyCorpus(FpmError):
    pass


class UnsupportedFormat(FpmError, ValueError):
    pass


class CorruptFile(FpmError, ValueError):
    pass


class ImageTooSmall(FpmError, ValueError):
    pass


class NonNegligibleImaginary(FpmError, ValueError):
    pass


class LengthMismatch(FpmError, ValueError):
    pass


class DimensionMismatch(FpmError, ValueError):
    pass


class DegenerateInput(FpmError, ValueError):
    pass


class SequenceTooShort(FpmError, ValueError):
    pass


class NoEligibleSubjects(FpmError):
    pass


class ConfigError(FpmError, ValueError):
    pass


class NonFiniteLoss(FpmError, ArithmeticError):
    """Training diverged. ``report`` holds the losses seen before the blow-up."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

"""Exception types raised across the package."""


class TrackingError(Exception):
    """Base class for all errors raised by hukcf."""


class DimensionMismatch(TrackingError, ValueError):
    pass


class ChannelMismatch(DimensionMismatch):
    pass


class ConjugateSymmetryViolation(TrackingError, ValueError):
    """Inverse transform of a spectrum that does not belong to a real signal."""


class EmptyTrainingSet(TrackingError, ValueError):
    pass


class DegenerateBin(TrackingError, ArithmeticError):
    """A frequency bin whose objective has no finite minimizer.

    ``index`` holds the (row, col) of the offending bin when raised from a
    grid solve, otherwise ``None``.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EmptyImage(TrackingError, ValueError):
    pass


class PatchTooSmall(TrackingError, ValueError):
    pass


class DoubleWindowing(TrackingError, ValueError):
    pass


class BoxTooSmall(TrackingError, ValueError):
    pass


class MissingGroundTruth(TrackingError, FileNotFoundError):
    pass


class FrameCountMismatch(UserWarning):
    """Frame and ground-truth counts differ; the sequence was truncated."""


class EmptyRecords(TrackingError, ValueError):
    pass


class SequenceSetMismatch(TrackingError, ValueError):
    pass

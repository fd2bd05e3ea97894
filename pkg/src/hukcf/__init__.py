"""Kernelized correlation filter tracking with a Huber-type regularizer."""
from ._backend import BACKEND
from .errors import (
    BoxTooSmall,
    ChannelMismatch,
    ConjugateSymmetryViolation,
    DegenerateBin,
    DimensionMismatch,
    DoubleWindowing,
    EmptyImage,
    EmptyRecords,
    EmptyTrainingSet,
    FrameCountMismatch,
    MissingGroundTruth,
    PatchTooSmall,
    SequenceSetMismatch,
    TrackingError,
)
from .huber import HuberConfig, solve_bin, solve_filter
from .kernel import KernelConfig, gaussian_kernel_correlation
from .tracker import HuberKCFTracker, TargetState, TrackerConfig, TrackerModel, psr, track_sequence

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoxTooSmall",
    "ChannelMismatch",
    "ConjugateSymmetryViolation",
    "DegenerateBin",
    "DimensionMismatch",
    "DoubleWindowing",
    "EmptyImage",
    "EmptyRecords",
    "EmptyTrainingSet",
    "FrameCountMismatch",
    "HuberConfig",
    "HuberKCFTracker",
    "KernelConfig",
    "MissingGroundTruth",
    "PatchTooSmall",
    "SequenceSetMismatch",
    "TargetState",
    "TrackerConfig",
    "TrackerModel",
    "TrackingError",
    "gaussian_kernel_correlation",
    "psr",
    "solve_bin",
    "solve_filter",
    "track_sequence",
]

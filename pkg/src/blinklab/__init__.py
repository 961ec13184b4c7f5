"""Driver-adaptive blink-behavior analytics.

Calibrates per-driver EAR baselines, segments blink cycles out of landmark or
EAR streams with a two-threshold hysteresis state machine, computes 13
per-blink features, and classifies each blink as non-drowsy/drowsy.
"""

from .calibration import CalibrationProfile, calibrate, thresholds
from .classify import (
    ALGORITHMS,
    CVReport,
    Dataset,
    Model,
    cross_validate,
    metrics,
    train,
)
from .ear import (
    DEFAULT_EYE_EPSILON,
    EarSample,
    LandmarkFrame,
    compute_eye_ear,
    compute_frame_ear,
    compute_stream_ear,
)
from .errors import (
    BlinklabError,
    DegenerateEye,
    DegenerateLabels,
    IncompleteCycle,
    InsufficientBlinks,
    InsufficientPerClass,
    InvalidCalibration,
    InvalidConfig,
    InvalidFeature,
    MalformedInput,
    SchemaMismatch,
    StreamOrder,
)
from .features import FEATURE_NAMES, FeatureVector, extract_features, split_sets
from .pipeline import (
    PipelineConfig,
    SessionReport,
    run_evaluate,
    run_extract,
    run_monitor,
    run_synth,
    run_train,
)
from .segmenter import (
    BlinkCycle,
    BlinkStart,
    CycleComplete,
    GapReset,
    Reopened,
    SegmenterState,
    finish,
    segment,
    step,
)
from .synth import SynthConfig, SynthTrace, generate

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BlinkCycle",
    "BlinkStart",
    "BlinklabError",
    "CVReport",
    "CalibrationProfile",
    "CycleComplete",
    "Dataset",
    "DegenerateEye",
    "DegenerateLabels",
    "DEFAULT_EYE_EPSILON",
    "EarSample",
    "FEATURE_NAMES",
    "FeatureVector",
    "GapReset",
    "IncompleteCycle",
    "InsufficientBlinks",
    "InsufficientPerClass",
    "InvalidCalibration",
    "InvalidConfig",
    "InvalidFeature",
    "LandmarkFrame",
    "MalformedInput",
    "Model",
    "PipelineConfig",
    "Reopened",
    "SchemaMismatch",
    "SegmenterState",
    "SessionReport",
    "SynthConfig",
    "SynthTrace",
    "StreamOrder",
    "calibrate",
    "compute_eye_ear",
    "compute_frame_ear",
    "compute_stream_ear",
    "cross_validate",
    "extract_features",
    "finish",
    "generate",
    "metrics",
    "run_evaluate",
    "run_extract",
    "run_monitor",
    "run_synth",
    "run_train",
    "segment",
    "split_sets",
    "step",
    "thresholds",
    "train",
]

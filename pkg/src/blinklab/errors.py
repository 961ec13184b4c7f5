"""Exception types shared across the pipeline."""


class BlinklabError(Exception):
    """Base class for all blinklab errors."""


class DegenerateEye(BlinklabError):
    """Eye landmarks collapsed to a near-zero horizontal span.

    Signals landmark-detection failure, never a blink: a closed eye still has
    a normal horizontal span.
    """

    def __init__(self, eye="eye", frame_index=None, span=0.0):
        self.eye = eye
        self.frame_index = frame_index
        self.span = span
        where = f" at frame {frame_index}" if frame_index is not None else ""
        super().__init__(f"{eye} eye degenerate{where} (horizontal span {span:g} px)")


class InvalidCalibration(BlinklabError):
    """No usable open-eye baseline (non-positive reference, missing fields, short stream)."""


class InsufficientBlinks(BlinklabError):
    """Too few complete blink cycles in the calibration window."""

    def __init__(self, found, needed):
        self.found = found
        self.needed = needed
        super().__init__(
            f"found {found} complete blink cycles in calibration window, need {needed}"
        )


class StreamOrder(BlinklabError):
    """Samples arrived with non-increasing frame indices (or decreasing timestamps)."""


class SchemaMismatch(BlinklabError):
    """Column or label layout does not match what the consumer expects."""


class IncompleteCycle(BlinklabError):
    """Feature extraction was asked for a cycle that never saw the next blink start."""


class DegenerateLabels(BlinklabError):
    """Training data contains a single class."""


class InvalidFeature(BlinklabError):
    """A feature value is NaN or infinite."""

    def __init__(self, row, column):
        self.row = row
        self.column = column
        super().__init__(f"non-finite feature at row {row}, column {column}")


class InsufficientPerClass(BlinklabError):
    """A class has fewer rows than the number of cross-validation folds."""


class InvalidConfig(BlinklabError):
    """Configuration value outside its documented range."""


class MalformedInput(BlinklabError):
    """An input line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no, reason):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")

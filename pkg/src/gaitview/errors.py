"""Exception hierarchy shared by every gaitview module."""


class GaitViewError(Exception):
    """Base class for all gaitview errors."""


# --- signal errors ---

class DegenerateSignal(GaitViewError):
    """Signal too short (or empty) for the requested operation."""


class ConstantSignal(GaitViewError):
    """Zero-variance (or zero-range) signal where variation is required."""


class LengthMismatch(GaitViewError):
    """Two signals were required to have equal length but do not."""


# --- ingest errors ---

class ParseError(GaitViewError):
    def __init__(self, line: int, column: int, reason: str):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class SchemaError(GaitViewError):
    """Value violates the declared CSV schema (unknown name, out-of-range field)."""


class DuplicateError(GaitViewError):
    """Duplicate (frame, keypoint) or (frame, marker) row."""


class GapTooLarge(GaitViewError):
    def __init__(self, keypoint: str, frame_range: tuple):
        self.keypoint = keypoint
        self.frame_range = frame_range
        super().__init__(f"gap for {keypoint!r} spanning frames {frame_range} cannot be repaired")


# --- filtering errors ---

class InvalidFilterSpec(GaitViewError):
    """Filter specification violates its invariants (e.g. cutoff at/above Nyquist)."""


class SignalTooShort(GaitViewError):
    """Signal shorter than the filter's padding requirement."""


# --- feature errors ---

class MissingLandmark(GaitViewError):
    """A landmark required by a feature is absent from the sequence."""


class NoWalkingDirection(GaitViewError):
    """Hip midpoint shows no net displacement; walking axis undefined."""


class DegenerateGeometry(GaitViewError):
    """Zero-length segment where an angle or direction is required."""


class FeatureError(GaitViewError):
    """Wraps a per-feature failure with the feature and side it occurred in."""

    def __init__(self, feature: str, side: str, cause: Exception):
        self.feature = feature
        self.side = side
        self.cause = cause
        super().__init__(f"({feature}, {side}): {cause}")


# --- metric errors ---

class MetricError(GaitViewError):
    """Wraps a metric failure with the (trial, feature, side, view) it occurred in."""

    def __init__(self, feature: str, side: str, view: str, cause: Exception):
        self.feature = feature
        self.side = side
        self.view = view
        self.cause = cause
        super().__init__(f"({feature}, {side}, {view}): {cause}")


# --- stats errors ---

class AllZeroDifferences(GaitViewError):
    """Every paired difference is zero; the signed-rank test is undefined."""


class EmptySample(GaitViewError):
    """An empty sample where at least one observation is required."""


class UnsupportedSampleSize(GaitViewError):
    """Sample size outside the supported range of the test."""


class ConstantSample(GaitViewError):
    """All values equal; the test statistic is undefined."""


class UnpairedSubject(GaitViewError):
    """A subject is missing one of the two views being compared."""


# --- dimensionality-reduction errors ---

class DegenerateMatrix(GaitViewError):
    """All-constant matrix: no variance to decompose."""


class DimensionMismatch(GaitViewError):
    """Matrix column count does not match the fitted basis."""


# --- synthesis errors ---

class BehindCamera(GaitViewError):
    def __init__(self, frame: int, marker: str):
        self.frame = frame
        self.marker = marker
        super().__init__(f"marker {marker!r} at or behind the camera plane in frame {frame}")


# --- cli errors ---

class NotAnalyzed(GaitViewError):
    """Recommendation requested before an analyze run produced outputs."""

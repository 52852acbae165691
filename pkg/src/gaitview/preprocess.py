"""Zero-phase Butterworth low-pass filtering for gait coordinate tracks.

The net filter order is even: an order/2 design is applied forward and
backward, which doubles the attenuation and cancels phase. Defaults (7 Hz
cutoff, 100 Hz sampling, net order 4) follow standard gait-lab practice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import InvalidFilterSpec, SignalTooShort
from .signal_core import TimeSeries

DEFAULT_CUTOFF_HZ = 7.0
DEFAULT_SAMPLE_RATE_HZ = 100.0
DEFAULT_ORDER = 4


@dataclass(frozen=True)
class FilterSpec:
    cutoff_hz: float = DEFAULT_CUTOFF_HZ
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    order: int = DEFAULT_ORDER  # net order; design order is order // 2

    def __post_init__(self):
        if self.cutoff_hz <= 0 or self.sample_rate_hz <= 0:
            raise InvalidFilterSpec("cutoff and sample rate must be positive")
        if self.cutoff_hz >= self.sample_rate_hz / 2:
            raise InvalidFilterSpec(
                f"cutoff {self.cutoff_hz} Hz at or above Nyquist "
                f"({self.sample_rate_hz / 2} Hz)"
            )
        if self.order < 2 or self.order % 2 != 0:
            raise InvalidFilterSpec(f"order must be even and >= 2, got {self.order}")

    @property
    def design_order(self) -> int:
        return self.order // 2

    @property
    def pad_len(self) -> int:
        return 3 * (self.order + 1)


def butterworth_coeffs(spec: FilterSpec) -> tuple[np.ndarray, np.ndarray]:
    """Discrete low-pass coefficients (b, a) for a single forward pass.

    Bilinear transform with frequency pre-warping of an analog Butterworth
    prototype of order spec.order / 2; DC gain is exactly 1.
    """
    b, a = sps.butter(spec.design_order, spec.cutoff_hz, btype="low", fs=spec.sample_rate_hz)
    return np.asarray(b), np.asarray(a)


def filtfilt(ts: TimeSeries, spec: FilterSpec | None = None) -> TimeSeries:
    """Apply the filter forward and backward (zero phase distortion).

    Edges are handled by odd reflection about the endpoints with padding
    length 3 * (order + 1); padding is stripped from the output.
    """
    if spec is None:
        spec = FilterSpec(sample_rate_hz=ts.sample_rate_hz)
    n = len(ts)
    if n <= spec.pad_len:
        raise SignalTooShort(
            f"signal length {n} must exceed padding length {spec.pad_len}"
        )
    b, a = butterworth_coeffs(spec)
    out = sps.filtfilt(b, a, ts.samples, padtype="odd", padlen=spec.pad_len)
    return TimeSeries(out, sample_rate_hz=ts.sample_rate_hz, label=ts.label)


def filtfilt_array(values: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """filtfilt over a raw array (axis 0); used on coordinate tracks."""
    if values.shape[0] <= spec.pad_len:
        raise SignalTooShort(
            f"signal length {values.shape[0]} must exceed padding length {spec.pad_len}"
        )
    b, a = butterworth_coeffs(spec)
    return sps.filtfilt(b, a, values, axis=0, padtype="odd", padlen=spec.pad_len)


def smooth_pose(seq, spec: FilterSpec | None = None):
    """Zero-phase filter each keypoint's x/y track; confidences untouched.

    Keypoints not present in every frame pass through unchanged (run
    fill_gaps first). Returns a new PoseSequence. Imported lazily to keep
    this module free of ingest at import time.
    """
    from .ingest import PoseFrame, PoseSequence

    if spec is None:
        spec = FilterSpec()
    n = len(seq.frames)
    out = [PoseFrame(fr.frame_index, fr.time_s, dict(fr.keypoints)) for fr in seq.frames]
    names = sorted({name for fr in seq.frames for name in fr.keypoints})
    for name in names:
        if not all(name in fr.keypoints for fr in seq.frames):
            continue
        track = np.array([fr.keypoints[name][:2] for fr in seq.frames])
        smoothed = filtfilt_array(track, spec)
        for i in range(n):
            conf = seq.frames[i].keypoints[name][2]
            out[i].keypoints[name] = (float(smoothed[i, 0]), float(smoothed[i, 1]), conf)
    return PoseSequence(view=seq.view, frames=out)


def smooth_markers(seq, spec: FilterSpec | None = None):
    """Zero-phase filter each marker's x/y/z track. Returns a new MarkerSequence."""
    from .ingest import MarkerFrame, MarkerSequence

    if spec is None:
        spec = FilterSpec()
    n = len(seq.frames)
    out = [MarkerFrame(fr.frame_index, fr.time_s, dict(fr.markers)) for fr in seq.frames]
    names = sorted(seq.frames[0].markers) if seq.frames else []
    for name in names:
        track = np.array([fr.markers[name] for fr in seq.frames])
        smoothed = filtfilt_array(track, spec)
        for i in range(n):
            out[i].markers[name] = tuple(float(v) for v in smoothed[i])
    return MarkerSequence(frames=out)

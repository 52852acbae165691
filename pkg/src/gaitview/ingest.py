"""Parsers for 2D keypoint CSVs and 3D marker CSVs, plus confidence-gap repair.

File schemas:
  2D pose:   header ``frame,time_s,keypoint,x,y,conf``, one row per (frame, keypoint)
  3D marker: header ``frame,time_s,marker,x,y,z``
  marker map: ``role = marker_name`` lines, ``#`` comments

All parsers are pure: a file either yields a sequence or raises a
positioned error; there is no partial silent output.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateError, GapTooLarge, ParseError, SchemaError
from .signal_core import ViewLabel

KEYPOINT_NAMES = (
    "nose",
    "left_eye", "right_eye",
    "left_ear", "right_ear",
    "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow",
    "left_wrist", "right_wrist",
    "left_hip", "right_hip",
    "left_knee", "right_knee",
    "left_ankle", "right_ankle",
)

POSE_HEADER = ["frame", "time_s", "keypoint", "x", "y", "conf"]
MARKER_HEADER = ["frame", "time_s", "marker", "x", "y", "z"]

DEFAULT_CONF_THRESHOLD = 0.3
DEFAULT_MAX_GAP = 10  # frames; 100 ms at 100 Hz


@dataclass
class PoseFrame:
    frame_index: int
    time_s: float
    keypoints: dict[str, tuple[float, float, float]] = field(default_factory=dict)


@dataclass
class MarkerFrame:
    frame_index: int
    time_s: float
    markers: dict[str, tuple[float, float, float]] = field(default_factory=dict)


@dataclass
class PoseSequence:
    view: ViewLabel
    frames: list[PoseFrame] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.frames)


@dataclass
class MarkerSequence:
    frames: list[MarkerFrame] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.frames)


def _open(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return source, False


def _parse_float(value: str, line: int, column: int, what: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ParseError(line, column, f"invalid {what}: {value!r}") from None
    if not math.isfinite(out):
        raise ParseError(line, column, f"non-finite {what}: {value!r}")
    return out


def _parse_int(value: str, line: int, column: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(line, column, f"invalid {what}: {value!r}") from None


def _check_header(row, expected, line):
    if row is None:
        raise ParseError(line, 1, "empty file, missing header")
    got = [c.strip() for c in row]
    if got != expected:
        raise ParseError(line, 1, f"bad header {got!r}, expected {expected!r}")


def parse_pose_csv(source, view: ViewLabel = ViewLabel.FRONTAL) -> PoseSequence:
    """Parse a 2D pose CSV into a PoseSequence with frames sorted by index."""
    handle, owned = _open(source)
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        _check_header(header, POSE_HEADER, 1)
        frames: dict[int, PoseFrame] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ParseError(line_no, len(row) + 1, f"expected 6 fields, got {len(row)}")
            frame = _parse_int(row[0], line_no, 1, "frame index")
            time_s = _parse_float(row[1], line_no, 2, "time")
            name = row[2].strip()
            if name not in KEYPOINT_NAMES:
                raise SchemaError(f"line {line_no}: unknown keypoint {name!r}")
            x = _parse_float(row[3], line_no, 4, "x")
            y = _parse_float(row[4], line_no, 5, "y")
            conf = _parse_float(row[5], line_no, 6, "confidence")
            if not (0.0 <= conf <= 1.0):
                raise SchemaError(f"line {line_no}: confidence {conf} outside [0, 1]")
            rec = frames.setdefault(frame, PoseFrame(frame, time_s))
            if name in rec.keypoints:
                raise DuplicateError(f"line {line_no}: duplicate (frame {frame}, keypoint {name!r})")
            rec.keypoints[name] = (x, y, conf)
        ordered = [frames[k] for k in sorted(frames)]
        return PoseSequence(view=view, frames=ordered)
    finally:
        if owned:
            handle.close()


def parse_marker_csv(source) -> MarkerSequence:
    """Parse a 3D marker CSV into a MarkerSequence with frames sorted by index."""
    handle, owned = _open(source)
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        _check_header(header, MARKER_HEADER, 1)
        frames: dict[int, MarkerFrame] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ParseError(line_no, len(row) + 1, f"expected 6 fields, got {len(row)}")
            frame = _parse_int(row[0], line_no, 1, "frame index")
            time_s = _parse_float(row[1], line_no, 2, "time")
            name = row[2].strip()
            if not name:
                raise SchemaError(f"line {line_no}: empty marker name")
            x = _parse_float(row[3], line_no, 4, "x")
            y = _parse_float(row[4], line_no, 5, "y")
            z = _parse_float(row[5], line_no, 6, "z")
            rec = frames.setdefault(frame, MarkerFrame(frame, time_s))
            if name in rec.markers:
                raise DuplicateError(f"line {line_no}: duplicate (frame {frame}, marker {name!r})")
            rec.markers[name] = (x, y, z)
        ordered = [frames[k] for k in sorted(frames)]
        seq = MarkerSequence(frames=ordered)
        if ordered:
            names = set(ordered[0].markers)
            for fr in ordered[1:]:
                if set(fr.markers) != names:
                    raise SchemaError(
                        f"marker set changes at frame {fr.frame_index}; must be constant per trial"
                    )
        return seq
    finally:
        if owned:
            handle.close()


def write_pose_csv(seq: PoseSequence, target) -> None:
    """Write a PoseSequence in the pose CSV schema (full float precision)."""
    handle, owned = _open_write(target)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(POSE_HEADER)
        for fr in seq.frames:
            for name in sorted(fr.keypoints):
                x, y, conf = fr.keypoints[name]
                writer.writerow([fr.frame_index, repr(fr.time_s), name, repr(x), repr(y), repr(conf)])
    finally:
        if owned:
            handle.close()


def write_marker_csv(seq: MarkerSequence, target) -> None:
    """Write a MarkerSequence in the marker CSV schema (full float precision)."""
    handle, owned = _open_write(target)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(MARKER_HEADER)
        for fr in seq.frames:
            for name in sorted(fr.markers):
                x, y, z = fr.markers[name]
                writer.writerow([fr.frame_index, repr(fr.time_s), name, repr(x), repr(y), repr(z)])
    finally:
        if owned:
            handle.close()


def _open_write(target):
    if isinstance(target, (str, Path)):
        return open(target, "w", encoding="utf-8", newline=""), True
    return target, False


def fill_gaps(
    seq: PoseSequence,
    conf_threshold: float = DEFAULT_CONF_THRESHOLD,
    max_gap: int = DEFAULT_MAX_GAP,
) -> PoseSequence:
    """Repair short low-confidence keypoint gaps by linear interpolation.

    A keypoint missing from a frame counts as a gap. Repaired points carry
    confidence equal to the threshold. Gaps longer than max_gap, or touching
    the first or last frame, raise GapTooLarge.
    """
    if max_gap < 0:
        raise ValueError("max_gap must be >= 0")
    if not (0.0 <= conf_threshold <= 1.0):
        raise ValueError("conf_threshold must be in [0, 1]")
    n = len(seq.frames)
    names = sorted({name for fr in seq.frames for name in fr.keypoints})
    out_frames = [PoseFrame(fr.frame_index, fr.time_s, dict(fr.keypoints)) for fr in seq.frames]

    for name in names:
        good = [
            i
            for i, fr in enumerate(seq.frames)
            if name in fr.keypoints and fr.keypoints[name][2] >= conf_threshold
        ]
        good_set = set(good)
        i = 0
        while i < n:
            if i in good_set:
                i += 1
                continue
            start = i
            while i < n and i not in good_set:
                i += 1
            end = i  # gap covers [start, end)
            frame_range = (seq.frames[start].frame_index, seq.frames[end - 1].frame_index)
            if start == 0 or end == n:
                raise GapTooLarge(name, frame_range)
            if end - start > max_gap:
                raise GapTooLarge(name, frame_range)
            x0, y0, _ = seq.frames[start - 1].keypoints[name]
            x1, y1, _ = seq.frames[end].keypoints[name]
            f0 = seq.frames[start - 1].frame_index
            f1 = seq.frames[end].frame_index
            for j in range(start, end):
                t = (seq.frames[j].frame_index - f0) / (f1 - f0)
                out_frames[j].keypoints[name] = (
                    x0 + t * (x1 - x0),
                    y0 + t * (y1 - y0),
                    conf_threshold,
                )
    return PoseSequence(view=seq.view, frames=out_frames)


def load_marker_map(source) -> dict[str, str]:
    """Parse a key/value marker-map config: anatomical role -> marker name."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    mapping: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(line_no, 1, f"expected 'role = marker' line, got {raw!r}")
        role, name = (part.strip() for part in line.split("=", 1))
        if not role or not name:
            raise ParseError(line_no, 1, f"empty role or marker name in {raw!r}")
        mapping[role] = name
    return mapping

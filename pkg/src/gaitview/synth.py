"""Synthetic 3D gait generator and pinhole-camera projector.

A deliberately simple sinusoidal kinematic chain: the pelvis translates at
constant speed along +x (vertical axis +z, subject's left +y), legs and
arms oscillate at the gait-cycle frequency with a left-right phase offset
of pi, and the shoulder and hip lines counter-rotate about the vertical
axis. Not biomechanically faithful; sufficient to exercise every pipeline
stage and reproduce the qualitative view asymmetries.

Camera presets: frontal 3 m anterior of the walking path at 1.2 m height
with a 10 degree downward tilt; lateral 2.5 m to the side at 0.9 m height
with no tilt. Intrinsics default to a generic 1000 px focal length on a
1920x1080 image with centered principal point.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import BehindCamera
from .ingest import (
    MarkerFrame,
    MarkerSequence,
    PoseFrame,
    PoseSequence,
    write_marker_csv,
    write_pose_csv,
)
from .signal_core import ViewLabel

MARKER_ROLES = (
    "head",
    "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow",
    "left_wrist", "right_wrist",
    "left_hip", "right_hip",
    "left_knee", "right_knee",
    "left_ankle", "right_ankle",
)

DEFAULT_FOCAL_PX = 1000.0
DEFAULT_IMAGE_SIZE = (1920, 1080)


@dataclass(frozen=True)
class GaitModelParams:
    n_frames: int = 169
    sample_rate_hz: float = 100.0
    cycle_hz: float = 1.0
    walking_speed_mps: float = 1.1
    hip_height_m: float = 0.95
    shoulder_height_m: float = 1.45
    head_height_m: float = 1.68
    hip_width_m: float = 0.30
    shoulder_width_m: float = 0.38
    thigh_len_m: float = 0.45
    shank_len_m: float = 0.44
    upper_arm_len_m: float = 0.30
    forearm_len_m: float = 0.28
    leg_swing_amp_deg: float = 22.0
    knee_flex_amp_deg: float = 42.0
    arm_swing_amp_deg: float = 18.0
    elbow_flex_deg: float = 20.0
    trunk_rot_amp_deg: float = 9.0
    hip_rot_amp_deg: float = 4.0
    marker_noise_sd_mm: float = 0.0  # 3D noise on generated markers
    noise_sd: float = 0.0  # pixel noise added to projected keypoints
    seed: int = 0

    def __post_init__(self):
        if self.n_frames < 2:
            raise ValueError("n_frames must be >= 2")
        for name in (
            "sample_rate_hz", "cycle_hz", "walking_speed_mps", "hip_height_m",
            "shoulder_height_m", "head_height_m", "hip_width_m", "shoulder_width_m",
            "thigh_len_m", "shank_len_m", "upper_arm_len_m", "forearm_len_m",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.marker_noise_sd_mm < 0 or self.noise_sd < 0:
            raise ValueError("noise standard deviations must be >= 0")


@dataclass(frozen=True)
class CameraModel:
    position: tuple[float, float, float]
    rotation: tuple  # 3x3 row-major: rows are camera right / down / forward in world
    focal_px: float = DEFAULT_FOCAL_PX
    principal_point: tuple[float, float] = (DEFAULT_IMAGE_SIZE[0] / 2, DEFAULT_IMAGE_SIZE[1] / 2)
    image_size: tuple[int, int] = DEFAULT_IMAGE_SIZE

    def __post_init__(self):
        if self.focal_px <= 0:
            raise ValueError("focal_px must be positive")
        r = np.asarray(self.rotation, dtype=float)
        if r.shape != (3, 3) or np.max(np.abs(r @ r.T - np.eye(3))) > 1e-9:
            raise ValueError("rotation must be a 3x3 orthonormal matrix")

    @property
    def rotation_matrix(self) -> np.ndarray:
        return np.asarray(self.rotation, dtype=float)


def make_camera(
    position,
    look_dir_ground,
    tilt_down_deg: float = 0.0,
    focal_px: float = DEFAULT_FOCAL_PX,
    image_size: tuple[int, int] = DEFAULT_IMAGE_SIZE,
) -> CameraModel:
    """Camera at `position` facing along a ground-plane direction, pitched
    down by tilt_down_deg."""
    d = np.asarray(look_dir_ground, dtype=float)
    d[2] = 0.0
    norm = np.linalg.norm(d)
    if norm == 0:
        raise ValueError("look direction must have a ground-plane component")
    d /= norm
    tilt = np.radians(tilt_down_deg)
    forward = np.cos(tilt) * d + np.sin(tilt) * np.array([0.0, 0.0, -1.0])
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(forward, up)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rot = np.vstack([right, down, forward])
    return CameraModel(
        position=tuple(float(v) for v in np.asarray(position, dtype=float)),
        rotation=tuple(tuple(float(v) for v in row) for row in rot),
        focal_px=focal_px,
        principal_point=(image_size[0] / 2, image_size[1] / 2),
        image_size=image_size,
    )


def preset_cameras(params: GaitModelParams) -> dict[ViewLabel, CameraModel]:
    """Frontal and lateral cameras matching the recording-geometry presets."""
    path_len = params.walking_speed_mps * (params.n_frames - 1) / params.sample_rate_hz
    frontal = make_camera(
        position=(path_len + 3.0, 0.0, 1.2),
        look_dir_ground=(-1.0, 0.0, 0.0),
        tilt_down_deg=10.0,
    )
    lateral = make_camera(
        position=(path_len / 2.0, -2.5, 0.9),
        look_dir_ground=(0.0, 1.0, 0.0),
        tilt_down_deg=0.0,
    )
    return {ViewLabel.FRONTAL: frontal, ViewLabel.LATERAL: lateral}


def _rot_z(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def generate_gait(params: GaitModelParams) -> MarkerSequence:
    """Deterministic sinusoidal walking trial as a 13-marker sequence (meters)."""
    p = params
    rng = np.random.default_rng([p.seed, 0x6A17])
    frames: list[MarkerFrame] = []
    omega = 2.0 * np.pi * p.cycle_hz
    for i in range(p.n_frames):
        t = i / p.sample_rate_hz
        phase = omega * t
        pelvis = np.array([p.walking_speed_mps * t, 0.0, p.hip_height_m])
        markers: dict[str, np.ndarray] = {}

        hip_rot = np.radians(p.hip_rot_amp_deg) * np.sin(phase)
        trunk_rot = -np.radians(p.trunk_rot_amp_deg) * np.sin(phase)
        rz_hip = _rot_z(hip_rot)
        rz_sh = _rot_z(trunk_rot)
        shoulder_mid = np.array([pelvis[0], 0.0, p.shoulder_height_m])
        for side, sign in (("left", 1.0), ("right", -1.0)):
            markers[f"{side}_hip"] = pelvis + rz_hip @ np.array([0.0, sign * p.hip_width_m / 2, 0.0])
            markers[f"{side}_shoulder"] = shoulder_mid + rz_sh @ np.array(
                [0.0, sign * p.shoulder_width_m / 2, 0.0]
            )
        markers["head"] = np.array([pelvis[0], 0.0, p.head_height_m])

        for side, side_phase in (("left", 0.0), ("right", np.pi)):
            leg = np.radians(p.leg_swing_amp_deg) * np.sin(phase + side_phase)
            # knee flexes most during the swing phase of the same leg
            flex = np.radians(p.knee_flex_amp_deg) * 0.5 * (1.0 - np.cos(phase + side_phase))
            hip = markers[f"{side}_hip"]
            knee = hip + p.thigh_len_m * np.array([np.sin(leg), 0.0, -np.cos(leg)])
            shank_angle = leg - flex
            ankle = knee + p.shank_len_m * np.array(
                [np.sin(shank_angle), 0.0, -np.cos(shank_angle)]
            )
            markers[f"{side}_knee"] = knee
            markers[f"{side}_ankle"] = ankle

            arm = np.radians(p.arm_swing_amp_deg) * np.sin(phase + side_phase + np.pi)
            shoulder = markers[f"{side}_shoulder"]
            elbow = shoulder + p.upper_arm_len_m * np.array([np.sin(arm), 0.0, -np.cos(arm)])
            fore_angle = arm + np.radians(p.elbow_flex_deg)
            wrist = elbow + p.forearm_len_m * np.array(
                [np.sin(fore_angle), 0.0, -np.cos(fore_angle)]
            )
            markers[f"{side}_elbow"] = elbow
            markers[f"{side}_wrist"] = wrist

        if p.marker_noise_sd_mm > 0:
            for name in markers:
                markers[name] = markers[name] + rng.normal(
                    0.0, p.marker_noise_sd_mm / 1000.0, size=3
                )
        frames.append(
            MarkerFrame(
                frame_index=i,
                time_s=t,
                markers={name: tuple(float(v) for v in pos) for name, pos in markers.items()},
            )
        )
    return MarkerSequence(frames=frames)


_FACE_OFFSETS = {
    # synthesized from the head marker; x is the walking direction
    "nose": (0.09, 0.0, -0.05),
    "left_eye": (0.07, 0.03, -0.02),
    "right_eye": (0.07, -0.03, -0.02),
    "left_ear": (0.0, 0.07, -0.03),
    "right_ear": (0.0, -0.07, -0.03),
}


def _keypoint_world(fr: MarkerFrame) -> dict[str, np.ndarray]:
    head = np.asarray(fr.markers["head"])
    points = {name: head + np.asarray(off) for name, off in _FACE_OFFSETS.items()}
    for role in MARKER_ROLES:
        if role != "head":
            points[role] = np.asarray(fr.markers[role])
    return points


def project(
    seq: MarkerSequence,
    cam: CameraModel,
    conf: float = 1.0,
    view: ViewLabel = ViewLabel.FRONTAL,
) -> PoseSequence:
    """Pinhole-project a marker sequence to the 17-keypoint pose schema.

    Face keypoints are synthesized from the head marker. Raises BehindCamera
    if any point reaches the camera plane.
    """
    rot = cam.rotation_matrix
    pos = np.asarray(cam.position)
    fx = cam.focal_px
    cx, cy = cam.principal_point
    frames: list[PoseFrame] = []
    for fr in seq.frames:
        keypoints: dict[str, tuple[float, float, float]] = {}
        for name, world in _keypoint_world(fr).items():
            pc = rot @ (world - pos)
            if pc[2] <= 1e-9:
                raise BehindCamera(fr.frame_index, name)
            u = cx + fx * pc[0] / pc[2]
            v = cy + fx * pc[1] / pc[2]
            keypoints[name] = (float(u), float(v), float(conf))
        frames.append(PoseFrame(frame_index=fr.frame_index, time_s=fr.time_s, keypoints=keypoints))
    return PoseSequence(view=view, frames=frames)


def add_pixel_noise(seq: PoseSequence, sd: float, rng: np.random.Generator) -> PoseSequence:
    """Add i.i.d. Gaussian noise to keypoint pixel coordinates."""
    if sd <= 0:
        return seq
    frames = []
    for fr in seq.frames:
        kps = {}
        for name, (x, y, conf) in sorted(fr.keypoints.items()):
            dx, dy = rng.normal(0.0, sd, size=2)
            kps[name] = (float(x + dx), float(y + dy), conf)
        frames.append(PoseFrame(fr.frame_index, fr.time_s, kps))
    return PoseSequence(view=seq.view, frames=frames)


def _randomized_params(base: GaitModelParams, rng: np.random.Generator) -> GaitModelParams:
    """Per-subject variation around the defaults."""
    return replace(
        base,
        n_frames=int(np.clip(round(rng.normal(base.n_frames, 14.0)), 80, 400)),
        cycle_hz=base.cycle_hz * float(rng.uniform(0.9, 1.1)),
        walking_speed_mps=base.walking_speed_mps * float(rng.uniform(0.85, 1.15)),
        leg_swing_amp_deg=base.leg_swing_amp_deg * float(rng.uniform(0.85, 1.15)),
        knee_flex_amp_deg=base.knee_flex_amp_deg * float(rng.uniform(0.85, 1.15)),
        arm_swing_amp_deg=base.arm_swing_amp_deg * float(rng.uniform(0.85, 1.15)),
        trunk_rot_amp_deg=base.trunk_rot_amp_deg * float(rng.uniform(0.85, 1.15)),
    )


def make_paired_dataset(
    params: GaitModelParams, subjects: int, out_dir
) -> Path:
    """Write per-subject 3D marker CSVs plus projected frontal/lateral pose
    CSVs and a manifest; returns the manifest path.

    Deterministic for a fixed params.seed: per-subject random streams are
    seed-derived, so parallel and serial generation match byte for byte.
    """
    if subjects < 1:
        raise ValueError("subjects must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_rows = []
    for subject in range(1, subjects + 1):
        rng = np.random.default_rng([params.seed, subject])
        sub_params = _randomized_params(params, rng)
        seq3d = generate_gait(replace(sub_params, seed=params.seed + subject))
        cams = preset_cameras(sub_params)
        marker_path = out / f"s{subject:02d}_mocap3d.csv"
        # generation is in meters; the marker CSV schema is millimeters
        seq_mm = MarkerSequence(
            frames=[
                MarkerFrame(
                    fr.frame_index,
                    fr.time_s,
                    {n: tuple(1000.0 * v for v in p) for n, p in fr.markers.items()},
                )
                for fr in seq3d.frames
            ]
        )
        write_marker_csv(seq_mm, marker_path)
        manifest_rows.append((subject, 1, "mocap3d", marker_path.name))
        for view in (ViewLabel.FRONTAL, ViewLabel.LATERAL):
            pose = project(seq3d, cams[view], conf=1.0, view=view)
            pose = add_pixel_noise(pose, sub_params.noise_sd, rng)
            pose_path = out / f"s{subject:02d}_{view.value}.csv"
            write_pose_csv(pose, pose_path)
            manifest_rows.append((subject, 1, view.value, pose_path.name))
    manifest = out / "manifest.csv"
    with open(manifest, "w", encoding="utf-8", newline="") as fh:
        fh.write("subject,trial,kind,path\n")
        for subject, trial, kind, name in manifest_rows:
            fh.write(f"{subject},{trial},{kind},{name}\n")
    return manifest

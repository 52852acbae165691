import numpy as np
import pytest

from gaitview.errors import FeatureError, MissingLandmark, NoWalkingDirection
from gaitview.features import (
    FEATURE_SIDES,
    FeatureName,
    extract_all,
    knee_rotation_signal,
    signal_key_name,
    step_length_signal,
    trunk_rotation_signal,
    walking_axis,
    wrist_hipmid_signal,
)
from gaitview.ingest import KEYPOINT_NAMES, PoseFrame, PoseSequence
from gaitview.metrics import max_cross_correlation
from gaitview.signal_core import SideLabel, ViewLabel
from gaitview.synth import GaitModelParams, generate_gait


def pose_seq(frames_kp, view=ViewLabel.LATERAL, fs=100.0):
    """Build a PoseSequence from a list of {keypoint: (x, y)} dicts."""
    frames = []
    for i, kp in enumerate(frames_kp):
        frames.append(PoseFrame(i, i / fs, {k: (x, y, 1.0) for k, (x, y) in kp.items()}))
    return PoseSequence(view=view, frames=frames)


def walking_frames(n=20, kp_extra=None):
    """Minimal straight-line walk along +x with fixed body layout."""
    out = []
    for i in range(n):
        x = float(i)
        kp = {
            "left_hip": (x, 10.0),
            "right_hip": (x, 12.0),
            "left_ankle": (x + 1.0, 0.0),
            "right_ankle": (x - 1.0, 0.0),
        }
        if kp_extra:
            kp.update(kp_extra(i))
        out.append(kp)
    return out


class TestSignalNames:
    def test_key_names(self):
        assert signal_key_name(FeatureName.STEP_LENGTH, SideLabel.LEFT) == "step_length_left"
        assert signal_key_name(FeatureName.TRUNK_ROTATION, SideLabel.BILATERAL) == "trunk_rotation"

    def test_layout_has_seven_signals(self):
        assert sum(len(v) for v in FEATURE_SIDES.values()) == 7


class TestWalkingAxis:
    def test_straight_walk_plus_x(self):
        seq = pose_seq(walking_frames())
        axis = walking_axis(seq)
        assert np.allclose(axis, [1.0, 0.0], atol=1e-12)

    def test_oriented_by_net_displacement(self):
        frames = walking_frames()[::-1]
        seq = pose_seq([dict(kp) for kp in frames])
        axis = walking_axis(seq)
        assert np.allclose(axis, [-1.0, 0.0], atol=1e-12)

    def test_stationary_rejected(self):
        kp = walking_frames(1)[0]
        seq = pose_seq([dict(kp) for _ in range(10)])
        with pytest.raises(NoWalkingDirection):
            walking_axis(seq)


class TestStepLength:
    def test_signed_and_antisymmetric(self):
        seq = pose_seq(walking_frames())
        left = step_length_signal(seq, SideLabel.LEFT)
        right = step_length_signal(seq, SideLabel.RIGHT)
        assert np.allclose(left.samples, 2.0, atol=1e-12)
        assert np.allclose(right.samples, -left.samples, atol=1e-12)

    def test_only_axis_component_counts(self):
        # lateral ankle offset is orthogonal to the walking axis
        def extra(i):
            return {
                "left_ankle": (float(i) + 3.0, 7.0),
                "right_ankle": (float(i), -4.0),
            }

        seq = pose_seq(walking_frames(kp_extra=extra))
        left = step_length_signal(seq, SideLabel.LEFT)
        assert np.allclose(left.samples, 3.0, atol=1e-12)


class TestKneeRotation:
    def cases(self):
        # (hip, knee, ankle, expected interior angle)
        return [
            ((0.0, 2.0), (0.0, 1.0), (0.0, 0.0), 180.0),
            ((0.0, 0.0), (0.0, 1.0), (1.0, 2.0), 90.0 + 45.0),
            ((0.0, 0.0), (0.0, 1.0), (1.0, 1.0), 90.0),
        ]

    def test_examples(self):
        for hip, knee, ankle, expected in self.cases():
            kp = {"left_hip": hip, "left_knee": knee, "left_ankle": ankle}
            seq = pose_seq([kp, kp])
            ts = knee_rotation_signal(seq, SideLabel.LEFT)
            assert abs(ts.samples[0] - expected) < 1e-9

    def test_similarity_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            pts = rng.normal(size=(3, 2)) * 5
            kp = {"left_hip": tuple(pts[0]), "left_knee": tuple(pts[1]), "left_ankle": tuple(pts[2])}
            base = knee_rotation_signal(pose_seq([kp]), SideLabel.LEFT).samples[0]
            ang = rng.uniform(0, 2 * np.pi)
            rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
            s = rng.uniform(0.1, 10)
            shift = rng.normal(size=2) * 100
            pts2 = pts @ rot.T * s + shift
            kp2 = {
                "left_hip": tuple(pts2[0]),
                "left_knee": tuple(pts2[1]),
                "left_ankle": tuple(pts2[2]),
            }
            moved = knee_rotation_signal(pose_seq([kp2]), SideLabel.LEFT).samples[0]
            assert abs(base - moved) < 1e-9


class TestTrunkRotation:
    def frame(self, shoulder_angle_deg):
        a = np.radians(shoulder_angle_deg)
        return {
            "left_hip": (-1.0, 0.0),
            "right_hip": (1.0, 0.0),
            "left_shoulder": (-np.cos(a), -np.sin(a)),
            "right_shoulder": (np.cos(a), np.sin(a)),
        }

    def test_aligned_is_zero(self):
        seq = pose_seq([self.frame(0.0)])
        assert abs(trunk_rotation_signal(seq).samples[0]) < 1e-12

    def test_signed_angle(self):
        for ang in (30.0, -30.0, 90.0, 179.0):
            seq = pose_seq([self.frame(ang)])
            assert abs(trunk_rotation_signal(seq).samples[0] - ang) < 1e-9

    def test_half_turn_maps_to_positive(self):
        seq = pose_seq([self.frame(180.0)])
        assert abs(trunk_rotation_signal(seq).samples[0] - 180.0) < 1e-9


class TestWristHipmid:
    def test_pythagorean(self):
        kp = {
            "left_hip": (0.0, 0.0),
            "right_hip": (0.0, 0.0),
            "left_wrist": (3.0, 4.0),
        }
        seq = pose_seq([kp])
        assert abs(wrist_hipmid_signal(seq, SideLabel.LEFT).samples[0] - 5.0) < 1e-12

    def test_midpoint_used(self):
        kp = {
            "left_hip": (-2.0, 0.0),
            "right_hip": (2.0, 0.0),
            "right_wrist": (0.0, 7.0),
        }
        seq = pose_seq([kp])
        assert abs(wrist_hipmid_signal(seq, SideLabel.RIGHT).samples[0] - 7.0) < 1e-12


class TestExtractAll:
    def full_frames(self, n=20):
        def extra(i):
            x = float(i)
            return {
                "left_knee": (x, 5.0),
                "right_knee": (x, 5.5),
                "left_shoulder": (x, 20.0),
                "right_shoulder": (x, 22.0),
                "left_wrist": (x + 0.5, 11.0),
                "right_wrist": (x - 0.5, 11.0),
            }

        return walking_frames(n, kp_extra=extra)

    def test_seven_signals(self):
        fs = extract_all(pose_seq(self.full_frames()))
        assert len(fs.signals) == 7
        for feature, sides in FEATURE_SIDES.items():
            for side in sides:
                assert (feature, side) in fs.signals

    def test_missing_landmark_wrapped(self):
        frames = self.full_frames()
        for kp in frames:
            del kp["left_wrist"]
        with pytest.raises(FeatureError) as info:
            extract_all(pose_seq(frames))
        assert info.value.feature == "wrist_hipmid"
        assert info.value.side == "left"
        assert isinstance(info.value.cause, MissingLandmark)

    def test_source_defaults_from_sequence(self):
        fs = extract_all(pose_seq(self.full_frames(), view=ViewLabel.FRONTAL))
        assert fs.source is ViewLabel.FRONTAL


class TestOnSynthetic:
    def test_step_length_sides_are_half_cycle_apart(self):
        # left and right step signals of a 1 Hz gait at 100 Hz are shifted
        # by ~50 frames; long signal keeps the correlation peak unbiased
        params = GaitModelParams(n_frames=1000)
        seq = generate_gait(params)
        left = step_length_signal(seq, SideLabel.LEFT)
        right = step_length_signal(seq, SideLabel.RIGHT)
        _, lag = max_cross_correlation(left, right)
        assert abs(lag) in (49, 50, 51)

    def test_knee_angle_range_plausible(self):
        seq = generate_gait(GaitModelParams())
        ts = knee_rotation_signal(seq, SideLabel.LEFT)
        assert np.all(ts.samples <= 180.0)
        assert ts.samples.min() > 90.0
        assert ts.samples.max() - ts.samples.min() > 20.0

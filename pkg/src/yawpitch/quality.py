"""Integer pose quality scores in [0, 100]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, InvalidArgumentError, MissingCalibrationError
from .lasso import LassoModel, predict
from .pose import FRONTAL, PoseAngles


def round_half_away(x):
    """Round to the nearest integer, halves away from zero (``round`` rounds half to even)."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True)
class Calibration:
    """Affine map of predicted similarity: ``s_floor -> 0`` and ``s_ceil -> 100``."""

    s_floor: float
    s_ceil: float

    def __post_init__(self):
        if not (math.isfinite(self.s_floor) and math.isfinite(self.s_ceil)):
            raise CalibrationError("calibration anchors must be finite")
        if not self.s_ceil > self.s_floor:
            raise CalibrationError(
                f"s_ceil ({self.s_ceil!r}) must exceed s_floor ({self.s_floor!r})"
            )

    def scale(self, similarity):
        raw = 100.0 * (similarity - self.s_floor) / (self.s_ceil - self.s_floor)
        return round_half_away(min(max(raw, 0.0), 100.0))


def iso_component(angle_deg) -> int:
    """``round(100 cos^2(angle))`` with |angle| clamped to 90 degrees."""
    angle = float(angle_deg)
    if not math.isfinite(angle):
        raise InvalidArgumentError(f"angle must be finite, got {angle!r}")
    a = min(abs(angle), 90.0)
    if a == 90.0:
        return 0
    # exact at the usual anchor angles; cos(pi/4)**2 is 0.5000000000000001
    return round_half_away(round(100.0 * math.cos(math.radians(a)) ** 2, 9))


def iso_fused(pose: PoseAngles) -> int:
    return min(iso_component(pose.yaw_deg), iso_component(pose.pitch_deg))


def calibrate(model: LassoModel, training_poses) -> Calibration:
    """Anchor frontal prediction at 100 and the worst training prediction at 0."""
    poses = list(training_poses)
    if not poses:
        raise InvalidArgumentError("calibration needs at least one training pose")
    s_ceil = predict(model, FRONTAL)
    s_floor = min(predict(model, p) for p in poses)
    if not s_ceil > s_floor:
        raise CalibrationError(
            f"degenerate model: frontal prediction {s_ceil!r} does not exceed "
            f"the minimum training prediction {s_floor!r}"
        )
    return Calibration(s_floor, s_ceil)


def syp_quality(model: LassoModel, cal: Calibration, pose: PoseAngles) -> int:
    if cal is None:
        raise MissingCalibrationError("model has no calibration; refit or calibrate it first")
    return cal.scale(predict(model, pose))


def iso_fused_array(yaw, pitch):
    """Vectorised ``iso_fused`` over angle arrays; returns int array."""
    yaw = np.asarray(yaw, dtype=float)
    pitch = np.asarray(pitch, dtype=float)
    cache = {}

    def comp(a):
        if a not in cache:
            cache[a] = iso_component(a)
        return cache[a]

    return np.array([min(comp(y), comp(p)) for y, p in zip(yaw.tolist(), pitch.tolist())], dtype=int)


def syp_quality_array(model: LassoModel, cal: Calibration, yaw, pitch):
    """Vectorised ``syp_quality``; equal to the scalar path element by element."""
    from .covariates import covariate_matrix

    if cal is None:
        raise MissingCalibrationError("model has no calibration; refit or calibrate it first")
    pred = model.predict_matrix(covariate_matrix(yaw, pitch, model.spec.degree))
    return np.array([cal.scale(v) for v in pred.tolist()], dtype=int)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import preset_model
from yawpitch.covariates import CovariateSpec
from yawpitch.errors import CalibrationError, InvalidArgumentError, MissingCalibrationError
from yawpitch.lasso import LassoModel, predict
from yawpitch.pose import PoseAngles, default_grid
from yawpitch.quality import (
    Calibration, calibrate, iso_component, iso_fused, iso_fused_array, round_half_away,
    syp_quality, syp_quality_array,
)

finite = st.floats(-1e4, 1e4, allow_nan=False)
angles = st.floats(-90, 90, allow_nan=False)


@pytest.mark.parametrize("angle,q", [(0, 100), (45, 50), (60, 25), (90, 0), (-90, 0), (-45, 50), (135, 0)])
def test_iso_component_anchors(angle, q):
    assert iso_component(angle) == q


def test_iso_component_nan():
    with pytest.raises(InvalidArgumentError):
        iso_component(math.inf)


@given(finite)
def test_iso_component_symmetric_and_bounded(a):
    q = iso_component(a)
    assert q == iso_component(-a)
    assert isinstance(q, int) and 0 <= q <= 100


@given(st.floats(0, 90), st.floats(0, 90))
def test_iso_component_monotone(a, b):
    lo, hi = sorted((a, b))
    assert iso_component(lo) >= iso_component(hi)


@pytest.mark.parametrize("pose,q", [((0, 0), 100), ((45, 0), 50), ((45, 60), 25)])
def test_iso_fused(pose, q):
    assert iso_fused(PoseAngles(*pose)) == q


def test_round_half_away():
    assert [round_half_away(x) for x in (0.5, 1.5, 2.5, -0.5, 49.4999)] == [1, 2, 3, -1, 49]


def _arcface_similarity(yaw, pitch):
    return (1.0 - 1.13e-02 * max(pitch, 0) + 1.12e-02 * min(pitch, 0)
            - 6.27e-03 * max(yaw, 0) + 8.73e-03 * min(yaw, 0))


class TestCalibrate:
    def test_ceil_is_intercept(self, arcface_model):
        assert calibrate(arcface_model, default_grid().cells).s_ceil == 1.0

    def test_floor_is_worst_grid_cell(self, arcface_model):
        cells = default_grid().cells
        worst = min(cells, key=lambda c: _arcface_similarity(c.yaw_deg, c.pitch_deg))
        assert worst.key == (-34.0, 34.0)
        cal = calibrate(arcface_model, cells)
        assert cal.s_floor == pytest.approx(_arcface_similarity(-34, 34), abs=1e-12)

    def test_constant_model_fails(self):
        spec = CovariateSpec(1)
        m = LassoModel(np.zeros(4), 1.0, 0.0, spec, spec.term_names)
        with pytest.raises(CalibrationError):
            calibrate(m, default_grid().cells)

    def test_bad_calibration(self):
        with pytest.raises(CalibrationError):
            Calibration(1.0, 1.0)


class TestSypQuality:
    def test_anchors(self, arcface_model):
        cells = default_grid().cells
        cal = calibrate(arcface_model, cells)
        assert syp_quality(arcface_model, cal, PoseAngles(0, 0)) == 100
        assert syp_quality(arcface_model, cal, PoseAngles(-34, 34)) == 0
        assert syp_quality(arcface_model, cal, PoseAngles(-80, 80)) == 0

    def test_missing_calibration(self, arcface_model):
        with pytest.raises(MissingCalibrationError):
            syp_quality(arcface_model, None, PoseAngles(0, 0))

    def test_nan_pose(self, arcface_model):
        with pytest.raises(InvalidArgumentError):
            syp_quality(arcface_model, Calibration(0, 1), PoseAngles(0, math.nan))

    @given(finite, finite)
    def test_integer_range(self, arcface_model, yaw, pitch):
        cal = Calibration(0.5, 1.0)
        q = syp_quality(arcface_model, cal, PoseAngles(max(-180, min(180, yaw)), max(-180, min(180, pitch))))
        assert isinstance(q, int) and 0 <= q <= 100

    @pytest.mark.parametrize("system", ["ArcFace", "MagFace", "CurricularFace", "AdaFace", "Cognitec"])
    @pytest.mark.parametrize("direction", [(1, 1), (1, -1), (-1, 1), (-1, -1), (0, 1), (1, 0)])
    def test_monotone_along_rays(self, system, direction):
        m = preset_model(system)
        cal = calibrate(m, default_grid().cells)
        qs = [syp_quality(m, cal, PoseAngles(direction[0] * r, direction[1] * r)) for r in range(0, 91, 3)]
        assert all(a >= b for a, b in zip(qs, qs[1:]))

    @given(angles, angles, angles, angles, st.floats(-1, 1), st.floats(0.01, 2))
    def test_recalibration_keeps_order(self, arcface_model, y1, p1, y2, p2, floor, width):
        a, b = PoseAngles(y1, p1), PoseAngles(y2, p2)
        if predict(arcface_model, a) < predict(arcface_model, b):
            a, b = b, a
        cal = Calibration(floor, floor + width)
        assert syp_quality(arcface_model, cal, a) >= syp_quality(arcface_model, cal, b)

    def test_array_path_matches_scalar(self, noisy_arcface_fit_n2):
        m = noisy_arcface_fit_n2
        cells = default_grid().cells
        cal = calibrate(m, cells)
        yaw = [c.yaw_deg for c in cells]
        pitch = [c.pitch_deg for c in cells]
        assert syp_quality_array(m, cal, yaw, pitch).tolist() == [syp_quality(m, cal, c) for c in cells]
        assert iso_fused_array(yaw, pitch).tolist() == [iso_fused(c) for c in cells]

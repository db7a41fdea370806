import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from yawpitch.biometrics import ComparisonRecord, error_rates_at
from yawpitch.covariates import covariate_matrix
from yawpitch.edc import EdcCurve, discard_fnmr, edc_curve, edc_from_arrays, pauc
from yawpitch.errors import InvalidArgumentError
from yawpitch.quality import calibrate, iso_fused_array, syp_quality_array

NON = [i / 100 for i in range(100)]  # 1% FMR threshold sits just above 0.98


def curve(points, max_discard=0.2):
    return EdcCurve(tuple(points), 0.5, max_discard)


class TestPauc:
    def test_rectangle(self):
        assert pauc(curve([(0, 0.1), (0.2, 0.1)]), 0.2) == pytest.approx(0.02, abs=1e-12)

    def test_steps(self):
        assert pauc(curve([(0, 0.1), (0.1, 0.05), (0.2, 0.0)]), 0.2) == pytest.approx(0.015, abs=1e-12)

    def test_zero(self):
        assert pauc(curve([(0, 0.0), (0.2, 0.0)]), 0.2) == 0.0

    def test_beyond_domain(self):
        with pytest.raises(InvalidArgumentError):
            pauc(curve([(0, 0.1), (0.2, 0.1)]), 0.3)

    @given(st.lists(st.tuples(st.floats(0.001, 0.2), st.floats(0, 1)), max_size=10), st.floats(0, 1),
           st.floats(0.001, 0.2))
    def test_bounds_and_redundant_points(self, inner, y0, extra):
        pts = sorted({x: y for x, y in inner}.items())
        pts = [(0.0, y0)] + [p for p in pts if p[0] > 0]
        c = curve(pts)
        a = pauc(c, 0.2)
        assert 0 <= a <= 0.2 + 1e-15
        assert a == pytest.approx(oracles.step_integral(pts, 0.2), abs=1e-12)
        # an extra point repeating the current step value leaves the area unchanged
        if extra not in dict(pts):
            padded = sorted(pts + [(extra, c.value_at(extra))])
            assert pauc(curve(padded), 0.2) == pytest.approx(a, abs=1e-12)


def _records(scores, quality):
    return [ComparisonRecord(f"r{i}", f"p{i}", s, True, reference_quality=100, probe_quality=q)
            for i, (s, q) in enumerate(zip(scores, quality))]


class TestCurve:
    def test_equal_qualities_only_endpoints(self):
        scores = [0.5, 0.99, 0.995, 0.97, 0.999]
        c = edc_curve(_records(scores, [50] * 5), NON, 0.01, 0.2)
        assert [p[0] for p in c.points] == [0.0, 0.2]
        assert c.points[0][1] == pytest.approx(2 / 5)
        # one comparison dropped in input order: 0.5 goes first
        assert c.points[1][1] == pytest.approx(1 / 4)

    def test_oracle_quality_reaches_zero(self):
        scores = [0.99] * 18 + [0.5, 0.6]
        quality = [80] * 18 + [3, 1]
        c = edc_curve(_records(scores, quality), NON, 0.01, 0.2)
        assert c.points[0][1] == pytest.approx(0.1)
        assert c.value_at(0.1) == 0.0 and c.points[-1] == (0.2, 0.0)

    def test_first_point_is_full_fnmr(self):
        rng = np.random.default_rng(0)
        s = rng.normal(0.9, 0.1, 300)
        c = edc_curve(_records(s, rng.integers(0, 101, 300)), NON, 0.01, 0.2)
        assert c.points[0][1] == error_rates_at((s, NON), c.threshold)[0]

    def test_points_match_brute_force(self):
        rng = np.random.default_rng(1)
        s = rng.normal(0.95, 0.05, 200).tolist()
        q = rng.integers(0, 30, 200).tolist()
        c = edc_curve(_records(s, q), NON, 0.01, 0.25)
        xs = [p[0] for p in c.points]
        assert xs[0] == 0 and all(a < b for a, b in zip(xs, xs[1:])) and xs[-1] == 0.25
        for x, y in c.points:
            k = int(round(x * 200)) if x < 0.25 else 50
            assert y == pytest.approx(oracles.fnmr_after_discard(s, q, c.threshold, k), abs=1e-15)

    def test_pairwise_minimum(self):
        recs = [ComparisonRecord("a", "b", 0.5, True, reference_quality=10, probe_quality=90),
                ComparisonRecord("c", "d", 0.99, True, reference_quality=50, probe_quality=50)]
        c = edc_curve(recs, NON, 0.01, 0.5)
        # the 0.5 comparison has pairwise quality 10 and is discarded first
        assert c.points == ((0.0, 0.5), (0.5, 0.0))

    def test_missing_quality(self):
        recs = [ComparisonRecord("a", "b", 0.5, True, probe_quality=3)]
        with pytest.raises(InvalidArgumentError):
            edc_curve(recs, NON)
        with pytest.raises(InvalidArgumentError):
            edc_curve([], NON)

    @pytest.mark.parametrize("bad", [0, -0.1, 1.5])
    def test_bad_max_discard(self, bad):
        with pytest.raises(InvalidArgumentError):
            edc_curve(_records([0.9], [1]), NON, 0.01, bad)


def oracle_dominates(scores, threshold, oracle_q, other_q, fractions):
    a = discard_fnmr(scores, oracle_q, threshold, fractions)
    b = discard_fnmr(scores, other_q, threshold, fractions)
    return bool(np.all(a <= b + 1e-15))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_oracle_dominates_random(seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(0.95, 0.06, 150)
    c0 = edc_from_arrays(s, np.full(150, 100), np.zeros(150), NON)
    oracle = np.where(s < c0.threshold, 0, 100)
    other = rng.integers(0, 101, 150)
    c1 = edc_from_arrays(s, np.full(150, 100), other, NON)
    xs = sorted({x for x, _ in c0.points} | {x for x, _ in c1.points})
    assert oracle_dominates(s, c0.threshold, oracle, other, xs)


def test_syp_curve_at_or_below_iso(noisy_arcface, noisy_arcface_fit_n2):
    cfg, yaw, pitch, s, non = noisy_arcface
    m = noisy_arcface_fit_n2
    cal = calibrate(m, cfg.grid.cells)
    ref = np.full(s.size, 100)
    syp = edc_from_arrays(s, ref, syp_quality_array(m, cal, yaw, pitch), non)
    iso = edc_from_arrays(s, ref, iso_fused_array(yaw, pitch), non)
    assert syp.value_at(0.2) <= iso.value_at(0.2)

import json
import math

import pytest
from hypothesis import given, strategies as st

from yawpitch.errors import InvalidArgumentError, NotFoundError
from yawpitch.pose import (
    PoseAngles, PoseEstimate, ReannotationTable, build_reannotation_table, default_grid,
    make_grid, reannotate,
)

angles = st.floats(-180, 180, allow_nan=False)


def est(nominal, yaw, pitch=0.0, sid=""):
    return PoseEstimate(PoseAngles(*nominal), PoseAngles(yaw, pitch), sid)


class TestPoseAngles:
    def test_rejects_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            PoseAngles(math.nan, 0)
        with pytest.raises(InvalidArgumentError):
            PoseAngles(0, math.inf)

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            PoseAngles(181, 0)
        with pytest.raises(InvalidArgumentError):
            PoseAngles(0, 0, -200)


class TestMakeGrid:
    def test_singleton(self):
        g = make_grid([0], [0])
        assert [c.key for c in g.cells] == [(0.0, 0.0)]

    def test_three_by_three_pitch_outer(self):
        g = make_grid([-20, 0, 20], [-20, 0, 20])
        assert len(g.cells) == 9
        assert [c.key for c in g.cells[:3]] == [(-20, -20), (0, -20), (20, -20)]

    def test_default_grid_has_144_cells(self):
        g = default_grid()
        assert len(g.cells) == 144
        keys = {c.key for c in g.cells}
        assert (0.0, 34.0) in keys and (34.0, 0.0) in keys
        assert min(g.yaw_values) == -34 and max(g.yaw_values) == 45
        assert min(g.pitch_values) == -21 and max(g.pitch_values) == 34

    def test_dedup_keeps_first_order(self):
        g = make_grid([20, 0, 20, -20], [5, 5])
        assert g.yaw_values == (20.0, 0.0, -20.0)
        assert g.pitch_values == (5.0,)

    @pytest.mark.parametrize("yaw,pitch", [([], [0]), ([0], []), ([math.nan], [0]), ([0], [math.inf])])
    def test_invalid(self, yaw, pitch):
        with pytest.raises(InvalidArgumentError):
            make_grid(yaw, pitch)

    @given(st.lists(st.integers(-90, 90), min_size=1, max_size=15),
           st.lists(st.integers(-90, 90), min_size=1, max_size=15))
    def test_cell_count_is_product_of_distinct(self, ys, ps):
        g = make_grid(ys, ps)
        assert len(g.cells) == len(set(ys)) * len(set(ps))
        assert {c.key for c in g.cells} == {(float(y), float(p)) for y in ys for p in ps}


class TestReannotation:
    def test_positive_yaw_anchor(self):
        t = build_reannotation_table([est((90, 0), y) for y in (44, 45, 46)])
        assert t.entries[(90.0, 0.0)] == (45.0, 0.0)

    def test_negative_yaw_anchor(self):
        t = build_reannotation_table([est((-90, 0), -34)])
        assert t.entries[(-90.0, 0.0)] == (-34.0, 0.0)

    def test_even_count_median_is_mean_of_middle(self):
        t = build_reannotation_table([est((0, 0), 10), est((0, 0), 20)])
        assert t.entries[(0.0, 0.0)][0] == 15.0

    def test_componentwise_median(self):
        ests = [est((10, 10), 1, 30), est((10, 10), 2, 10), est((10, 10), 3, 20)]
        assert build_reannotation_table(ests).entries[(10.0, 10.0)] == (2.0, 20.0)

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            build_reannotation_table([])

    @given(st.lists(st.tuples(st.sampled_from([(0, 0), (90, 0), (0, 40)]), angles, angles), min_size=1, max_size=30),
           st.randoms())
    def test_permutation_invariant(self, items, rnd):
        ests = [est(n, y, p) for n, y, p in items]
        shuffled = list(ests)
        rnd.shuffle(shuffled)
        assert build_reannotation_table(ests) == build_reannotation_table(shuffled)

    @given(st.lists(angles, min_size=1, max_size=25).filter(lambda v: len(v) % 2 == 1))
    def test_odd_median_is_member(self, yaws):
        t = build_reannotation_table([est((0, 0), y) for y in yaws])
        assert t.entries[(0.0, 0.0)][0] in yaws

    def test_lookup(self):
        t = ReannotationTable({(90.0, 0.0): (45.0, 0.0), (0.0, 0.0): (0.0, 0.0)})
        assert reannotate(t, PoseAngles(90, 0)) == PoseAngles(45, 0)
        assert reannotate(t, PoseAngles(0, 0)) == PoseAngles(0, 0)

    def test_roll_passes_through(self):
        t = ReannotationTable({(90.0, 0.0): (45.0, 0.0)})
        assert reannotate(t, PoseAngles(90, 0, 12.5)).roll_deg == 12.5

    def test_missing_key_names_pose(self):
        t = ReannotationTable({(90.0, 0.0): (45.0, 0.0)})
        with pytest.raises(NotFoundError, match="yaw=50"):
            reannotate(t, PoseAngles(50, 0))

    def test_json_round_trip(self):
        t = ReannotationTable({(90.0, 0.0): (45.0, 1.5), (-90.0, 0.0): (-34.0, 0.0)})
        data = json.loads(json.dumps(t.to_json()))
        assert data["entries"][0] == {"nominal": [-90.0, 0.0], "adjusted": [-34.0, 0.0]}
        assert ReannotationTable.from_json(data) == t

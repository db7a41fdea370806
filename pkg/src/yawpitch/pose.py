"""Head-pose types, yaw-pitch grids and median-based pose re-annotation."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from statistics import median
from typing import Iterable, Optional

from .errors import InvalidArgumentError, NotFoundError

# 12 signed values per axis spanning the range a 3D-aware generator actually
# reaches after re-annotation (yaw -34..45, pitch -21..34); 0 and +34 are on
# both axes so the yaw/pitch intersection cells line up.
DEFAULT_YAW_VALUES = (-34.0, -27.0, -20.0, -13.0, -7.0, 0.0, 7.0, 13.0, 20.0, 27.0, 34.0, 45.0)
DEFAULT_PITCH_VALUES = (-21.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 34.0)


def _check_angle(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    if not -180.0 <= value <= 180.0:
        raise InvalidArgumentError(f"{name} must lie in [-180, 180], got {value!r}")
    return value


@dataclass(frozen=True)
class PoseAngles:
    """Head rotation in degrees. Roll is carried along but never modelled."""

    yaw_deg: float
    pitch_deg: float
    roll_deg: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "yaw_deg", _check_angle("yaw_deg", self.yaw_deg))
        object.__setattr__(self, "pitch_deg", _check_angle("pitch_deg", self.pitch_deg))
        if self.roll_deg is not None:
            object.__setattr__(self, "roll_deg", _check_angle("roll_deg", self.roll_deg))

    @property
    def key(self):
        return (self.yaw_deg, self.pitch_deg)


FRONTAL = PoseAngles(0.0, 0.0)


@dataclass(frozen=True)
class PoseGrid:
    yaw_values: tuple
    pitch_values: tuple
    cells: tuple = field(init=False)

    def __post_init__(self):
        # pitch outer, yaw inner
        cells = tuple(PoseAngles(y, p) for p in self.pitch_values for y in self.yaw_values)
        object.__setattr__(self, "cells", cells)

    def __len__(self):
        return len(self.cells)

    @property
    def shape(self):
        return (len(self.pitch_values), len(self.yaw_values))


def _dedupe(values, name):
    values = list(values)
    if not values:
        raise InvalidArgumentError(f"{name} must not be empty")
    out = []
    seen = set()
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise InvalidArgumentError(f"{name} contains non-finite value {v!r}")
        if v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)


def make_grid(yaw_values, pitch_values):
    """Build the yaw x pitch Cartesian grid, keeping first-seen order."""
    return PoseGrid(_dedupe(yaw_values, "yaw_values"), _dedupe(pitch_values, "pitch_values"))


def default_grid():
    return make_grid(DEFAULT_YAW_VALUES, DEFAULT_PITCH_VALUES)


@dataclass(frozen=True)
class PoseEstimate:
    nominal: PoseAngles
    estimated: PoseAngles
    sample_id: str = ""


@dataclass(frozen=True)
class ReannotationTable:
    """Lookup from nominal generator pose labels to measured poses."""

    entries: dict

    def __post_init__(self):
        for nominal, adjusted in self.entries.items():
            for v in (*nominal, *adjusted):
                if not math.isfinite(v):
                    raise InvalidArgumentError(f"non-finite angle in entry {nominal} -> {adjusted}")

    def __len__(self):
        return len(self.entries)

    def to_json(self):
        return {
            "entries": [
                {"nominal": [y, p], "adjusted": [yh, ph]}
                for (y, p), (yh, ph) in sorted(self.entries.items())
            ]
        }

    @classmethod
    def from_json(cls, data):
        entries = {}
        for item in data["entries"]:
            key = tuple(float(v) for v in item["nominal"])
            if key in entries:
                raise InvalidArgumentError(f"duplicate nominal pose {key}")
            entries[key] = tuple(float(v) for v in item["adjusted"])
        return cls(entries)


def build_reannotation_table(estimates: Iterable[PoseEstimate]) -> ReannotationTable:
    """Map every nominal (yaw, pitch) to the componentwise median of its estimates.

    Even-sized groups use the mean of the two middle values.
    """
    yaws = defaultdict(list)
    pitches = defaultdict(list)
    for est in estimates:
        key = est.nominal.key
        yaws[key].append(est.estimated.yaw_deg)
        pitches[key].append(est.estimated.pitch_deg)
    if not yaws:
        raise InvalidArgumentError("no pose estimates given")
    return ReannotationTable(
        {key: (float(median(yaws[key])), float(median(pitches[key]))) for key in yaws}
    )


def reannotate(table: ReannotationTable, nominal: PoseAngles) -> PoseAngles:
    try:
        yaw, pitch = table.entries[nominal.key]
    except KeyError:
        raise NotFoundError(
            f"pose (yaw={nominal.yaw_deg:g}, pitch={nominal.pitch_deg:g}) not in re-annotation table"
        ) from None
    return PoseAngles(yaw, pitch, nominal.roll_deg)

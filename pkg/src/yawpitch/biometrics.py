"""Verification error rates from mated / non-mated similarity scores.

A comparison is a match when ``score >= threshold``. FNMR counts mated scores
strictly below the threshold, FMR counts non-mated scores at or above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .pose import PoseAngles, PoseGrid, make_grid

METRICS = ("eer", "fnmr@fmr", "fmr@fnmr")


@dataclass(frozen=True)
class ComparisonRecord:
    reference_id: str
    probe_id: str
    score: float
    mated: bool
    probe_pose: Optional[PoseAngles] = None
    reference_pose: Optional[PoseAngles] = None
    probe_quality: Optional[int] = None
    reference_quality: Optional[int] = None

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise InvalidArgumentError(f"score must be finite, got {self.score!r}")


class ScoreSet:
    """Sorted, validated mated and non-mated score arrays."""

    def __init__(self, mated, nonmated):
        self.mated = self._clean(mated, "mated")
        self.nonmated = self._clean(nonmated, "nonmated")

    @staticmethod
    def _clean(values, name):
        arr = np.sort(np.asarray(values, dtype=float).reshape(-1))
        if arr.size == 0:
            raise InvalidArgumentError(f"{name} score list is empty")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError(f"{name} scores must be finite")
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_records(cls, records):
        mated = [r.score for r in records if r.mated]
        nonmated = [r.score for r in records if not r.mated]
        return cls(mated, nonmated)

    def fnmr(self, threshold):
        return np.searchsorted(self.mated, threshold, side="left") / self.mated.size

    def fmr(self, threshold):
        return (self.nonmated.size - np.searchsorted(self.nonmated, threshold, side="left")) / self.nonmated.size


def _as_scoreset(scores):
    if isinstance(scores, ScoreSet):
        return scores
    mated, nonmated = scores
    return ScoreSet(mated, nonmated)


def error_rates_at(scores, threshold):
    """Return ``(fnmr, fmr)`` at ``threshold``."""
    ss = _as_scoreset(scores)
    return float(ss.fnmr(threshold)), float(ss.fmr(threshold))


def eer(scores) -> float:
    """Equal error rate from an empirical threshold sweep.

    Operating points are taken at every distinct score plus one threshold
    above all scores. An exact FNMR == FMR point is returned as is; otherwise
    the two points bracketing the sign change of FNMR - FMR are linearly
    interpolated.
    """
    ss = _as_scoreset(scores)
    thresholds = np.append(np.unique(np.concatenate([ss.mated, ss.nonmated])), np.inf)
    fnmr = ss.fnmr(thresholds)
    fmr = ss.fmr(thresholds)
    diff = fnmr - fmr
    ties = np.flatnonzero(diff == 0)
    if ties.size:
        return float(fnmr[ties[0]])
    i = int(np.argmax(diff > 0))
    a, b = i - 1, i
    w = -diff[a] / (diff[b] - diff[a])
    return float(fnmr[a] + w * (fnmr[b] - fnmr[a]))


def _max_count(rate, n):
    """Largest k with k / n <= rate under float division."""
    k = int(math.floor(rate * n))
    while (k + 1) / n <= rate:
        k += 1
    while k > 0 and k / n > rate:
        k -= 1
    return k


def _check_target(target, name):
    if not (isinstance(target, (int, float)) and 0.0 < target < 1.0):
        raise InvalidArgumentError(f"{name} must lie strictly between 0 and 1, got {target!r}")


def threshold_at_fmr(scores, fmr_target) -> float:
    """Smallest threshold whose FMR does not exceed ``fmr_target``.

    The admissible set is open below, so the value returned is the next float
    above the critical non-mated score.
    """
    _check_target(fmr_target, "fmr_target")
    ss = _as_scoreset(scores)
    k = _max_count(fmr_target, ss.nonmated.size)
    if k >= ss.nonmated.size:
        return float(ss.nonmated[0])
    critical = ss.nonmated[ss.nonmated.size - 1 - k]
    return float(np.nextafter(critical, np.inf))


def threshold_at_fnmr(scores, fnmr_target) -> float:
    """Largest threshold whose FNMR does not exceed ``fnmr_target``."""
    _check_target(fnmr_target, "fnmr_target")
    ss = _as_scoreset(scores)
    k = _max_count(fnmr_target, ss.mated.size)
    if k >= ss.mated.size:
        return math.inf
    return float(ss.mated[k])


def fnmr_at_fmr(scores, fmr_target=0.01) -> float:
    ss = _as_scoreset(scores)
    return float(ss.fnmr(threshold_at_fmr(ss, fmr_target)))


def fmr_at_fnmr(scores, fnmr_target=0.01) -> float:
    ss = _as_scoreset(scores)
    return float(ss.fmr(threshold_at_fnmr(ss, fnmr_target)))


def compute_metric(scores, metric, target=0.01):
    if metric == "eer":
        return eer(scores)
    if metric == "fnmr@fmr":
        return fnmr_at_fmr(scores, target)
    if metric == "fmr@fnmr":
        return fmr_at_fnmr(scores, target)
    raise InvalidArgumentError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass(frozen=True)
class SurfaceGrid:
    """Per-cell metric values parallel to ``grid.cells``; missing cells are NaN."""

    grid: PoseGrid
    metric: str
    target: float
    values: np.ndarray
    missing: tuple

    def value_at(self, yaw, pitch):
        for cell, v in zip(self.grid.cells, self.values):
            if cell.key == (float(yaw), float(pitch)):
                return float(v)
        raise KeyError((yaw, pitch))

    def as_matrix(self):
        """Values reshaped to (pitch, yaw)."""
        return self.values.reshape(self.grid.shape)

    def rows(self):
        for cell, v in zip(self.grid.cells, self.values):
            yield cell.pitch_deg, cell.yaw_deg, self.metric, (None if math.isnan(v) else float(v))


def surface_grid(records, nonmated, metric="fnmr@fmr", target=0.01, grid=None) -> SurfaceGrid:
    """Metric per probe-pose cell against one shared non-mated distribution.

    Without ``grid`` the cells are the distinct probe poses found in
    ``records`` (sorted). Cells without mated records are reported in
    ``missing`` and hold NaN.
    """
    if metric not in METRICS:
        raise InvalidArgumentError(f"unknown metric {metric!r}; expected one of {METRICS}")
    nonmated = ScoreSet._clean(nonmated, "nonmated")
    by_cell = {}
    for r in records:
        if not r.mated:
            continue
        if r.probe_pose is None:
            raise InvalidArgumentError(f"mated record {r.reference_id}/{r.probe_id} has no probe pose")
        by_cell.setdefault(r.probe_pose.key, []).append(r.score)
    if grid is None:
        if not by_cell:
            raise InvalidArgumentError("no mated records")
        grid = make_grid(sorted({k[0] for k in by_cell}), sorted({k[1] for k in by_cell}))
    values = np.full(len(grid.cells), np.nan)
    missing = []
    for i, cell in enumerate(grid.cells):
        scores = by_cell.get(cell.key)
        if not scores:
            missing.append(cell.key)
            continue
        values[i] = compute_metric(ScoreSet(scores, nonmated), metric, target)
    values.setflags(write=False)
    return SurfaceGrid(grid, metric, target, values, tuple(missing))

"""Error-vs-Discard Characteristic curves and their partial area."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .biometrics import ScoreSet, threshold_at_fmr
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class EdcCurve:
    points: tuple  # ((discard_fraction, fnmr), ...)
    threshold: float
    max_discard: float
    fmr_target: float = 0.01

    @property
    def discard(self):
        return np.array([p[0] for p in self.points])

    @property
    def fnmr(self):
        return np.array([p[1] for p in self.points])

    def value_at(self, fraction):
        """Step (right-continuous) value of the curve."""
        x = self.discard
        i = int(np.searchsorted(x, fraction, side="right")) - 1
        return float(self.points[max(i, 0)][1])


def pairwise_quality(reference_quality, probe_quality):
    return np.minimum(np.asarray(reference_quality), np.asarray(probe_quality))


class _Discarder:
    """Mated comparisons ordered by ascending pairwise quality (stable)."""

    def __init__(self, mated_scores, quality, threshold):
        mated_scores = np.asarray(mated_scores, dtype=float)
        quality = np.asarray(quality, dtype=float)
        order = np.argsort(quality, kind="stable")
        self.quality = quality[order]
        errors = (mated_scores[order] < threshold).astype(np.int64)
        # errors_removed[k]: false non-matches among the first k discarded
        self.errors_removed = np.concatenate([[0], np.cumsum(errors)])
        self.total_errors = int(self.errors_removed[-1])
        self.size = mated_scores.size

    def fnmr_after(self, k):
        kept = self.size - k
        if kept == 0:
            return 0.0
        return (self.total_errors - int(self.errors_removed[k])) / kept

    def count_for(self, fraction):
        # tolerate fractions that are k/M up to rounding
        return min(self.size, int(math.floor(fraction * self.size + 1e-9)))


def _validate(mated_scores, reference_quality, probe_quality):
    mated_scores = np.asarray(mated_scores, dtype=float)
    if mated_scores.size == 0:
        raise InvalidArgumentError("no mated comparisons")
    for name, q in (("reference_quality", reference_quality), ("probe_quality", probe_quality)):
        if q is None:
            raise InvalidArgumentError(f"{name} missing")
        q = np.asarray(q, dtype=float)
        if q.shape != mated_scores.shape or not np.all(np.isfinite(q)):
            raise InvalidArgumentError(f"{name} must be given for every mated comparison")
    return mated_scores


def edc_from_arrays(mated_scores, reference_quality, probe_quality, nonmated,
                    fmr_target=0.01, max_discard=0.2) -> EdcCurve:
    """EDC curve over FNMR with a threshold fixed on the full dataset.

    Comparisons are discarded in ascending order of ``min(reference, probe)``
    quality. One point is emitted for each distinct quality level fully
    discarded within ``max_discard``, plus the two endpoints.
    """
    if not 0.0 < max_discard <= 1.0:
        raise InvalidArgumentError(f"max_discard must lie in (0, 1], got {max_discard!r}")
    mated_scores = _validate(mated_scores, reference_quality, probe_quality)
    scores = ScoreSet(mated_scores, nonmated)
    threshold = threshold_at_fmr(scores, fmr_target)
    d = _Discarder(mated_scores, pairwise_quality(reference_quality, probe_quality), threshold)
    M = d.size
    points = [(0.0, d.fnmr_after(0))]
    # last index of each run of equal quality
    ends = np.flatnonzero(np.diff(d.quality) != 0) + 1
    ends = np.append(ends, M)
    for k in ends.tolist():
        f = k / M
        if f > max_discard:
            break
        if f > points[-1][0]:
            points.append((f, d.fnmr_after(k)))
    if max_discard > points[-1][0]:
        points.append((float(max_discard), d.fnmr_after(d.count_for(max_discard))))
    return EdcCurve(tuple(points), threshold, float(max_discard), fmr_target)


def edc_curve(records, nonmated, fmr_target=0.01, max_discard=0.2) -> EdcCurve:
    """EDC curve from mated :class:`ComparisonRecord` objects carrying qualities."""
    mated = [r for r in records if r.mated]
    if not mated:
        raise InvalidArgumentError("no mated comparisons")
    for r in mated:
        if r.probe_quality is None or r.reference_quality is None:
            raise InvalidArgumentError(
                f"comparison {r.reference_id}/{r.probe_id} lacks a reference or probe quality"
            )
    return edc_from_arrays(
        [r.score for r in mated],
        [r.reference_quality for r in mated],
        [r.probe_quality for r in mated],
        nonmated, fmr_target, max_discard,
    )


def discard_fnmr(mated_scores, quality, threshold, fractions):
    """FNMR after discarding ``floor(f * M)`` lowest-quality comparisons, per fraction.

    Ties in ``quality`` are broken by input order, so this is defined for any
    fraction, not only at quality-level boundaries.
    """
    d = _Discarder(mated_scores, quality, threshold)
    return np.array([d.fnmr_after(d.count_for(f)) for f in np.atleast_1d(fractions)])


def pauc(curve: EdcCurve, max_discard=0.2) -> float:
    """Area under the step-interpolated curve on ``[0, max_discard]``."""
    if not 0.0 <= max_discard <= curve.max_discard + 1e-12:
        raise InvalidArgumentError(
            f"max_discard {max_discard!r} exceeds the curve domain {curve.max_discard!r}"
        )
    area = 0.0
    pts = curve.points
    for (x0, y0), (x1, _) in zip(pts, pts[1:] + ((math.inf, 0.0),)):
        if x0 >= max_discard:
            break
        area += y0 * (min(x1, max_discard) - x0)
    return area

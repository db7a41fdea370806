"""Sign-split polynomial covariates of yaw and pitch.

Each angle is split into a non-negative part ``max(a, 0)`` and a non-positive
part ``min(a, 0)`` (the latter keeps its sign). For degree ``n`` the covariate
vector holds, in this order:

* for ``i = 1..n``: ``p+^i, p-^i, y+^i, y-^i``
* for ``i = 2..n``: ``p+^(i-1)*y+^(i-1), p+^(i-1)*y-^(i-1), p-^(i-1)*y+^(i-1), p-^(i-1)*y-^(i-1)``

giving ``T = 4n + 4(n - 1)`` terms. Angles stay in degrees. The constant
``i = 1`` interaction is the intercept and is not emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

_PARTS = ("p+", "p-", "y+", "y-")
_CROSS = (("p+", "y+"), ("p+", "y-"), ("p-", "y+"), ("p-", "y-"))


@dataclass(frozen=True)
class CovariateSpec:
    degree: int = 2
    include_intercept: bool = True

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 1:
            raise InvalidArgumentError(f"degree must be an integer >= 1, got {self.degree!r}")

    @property
    def n_terms(self):
        return 8 * self.degree - 4

    @property
    def term_names(self):
        return term_names(self.degree)


@dataclass(frozen=True)
class CovariateVector:
    values: tuple
    term_names: tuple


def term_names(degree):
    names = [f"{part}^{i}" for i in range(1, degree + 1) for part in _PARTS]
    for i in range(2, degree + 1):
        names += [f"{a}^{i - 1}*{b}^{i - 1}" for a, b in _CROSS]
    return tuple(names)


def split_signed(angle_deg):
    """Return ``(max(angle, 0), min(angle, 0))``."""
    angle = float(angle_deg)
    if not math.isfinite(angle):
        raise InvalidArgumentError(f"angle must be finite, got {angle!r}")
    return max(angle, 0.0), min(angle, 0.0)


def _columns(yaw, pitch, degree):
    """Vectorised covariates for arrays of yaw/pitch; returns an (N, T) array."""
    parts = {
        "p+": np.maximum(pitch, 0.0),
        "p-": np.minimum(pitch, 0.0),
        "y+": np.maximum(yaw, 0.0),
        "y-": np.minimum(yaw, 0.0),
    }
    cols = [parts[p] ** i for i in range(1, degree + 1) for p in _PARTS]
    for i in range(2, degree + 1):
        cols += [parts[a] ** (i - 1) * parts[b] ** (i - 1) for a, b in _CROSS]
    return np.column_stack(cols)


def covariate_matrix(yaw, pitch, degree):
    """Design matrix straight from yaw/pitch arrays (degrees)."""
    yaw = np.asarray(yaw, dtype=float).reshape(-1)
    pitch = np.asarray(pitch, dtype=float).reshape(-1)
    if yaw.shape != pitch.shape:
        raise InvalidArgumentError("yaw and pitch arrays differ in length")
    if yaw.size == 0:
        raise InvalidArgumentError("no poses given")
    if not (np.all(np.isfinite(yaw)) and np.all(np.isfinite(pitch))):
        raise InvalidArgumentError("pose angles must be finite")
    CovariateSpec(degree)
    return _columns(yaw, pitch, degree)


def covariate_vector(pose, spec: CovariateSpec) -> CovariateVector:
    split_signed(pose.yaw_deg)
    split_signed(pose.pitch_deg)
    row = _columns(np.array([pose.yaw_deg]), np.array([pose.pitch_deg]), spec.degree)[0]
    return CovariateVector(tuple(float(v) for v in row), spec.term_names)


def design_matrix(poses, spec: CovariateSpec):
    """Stack covariate rows for ``poses``; returns ``(matrix, term_names)``."""
    poses = list(poses)
    if not poses:
        raise InvalidArgumentError("design_matrix needs at least one pose")
    yaw = np.array([p.yaw_deg for p in poses], dtype=float)
    pitch = np.array([p.pitch_deg for p in poses], dtype=float)
    return covariate_matrix(yaw, pitch, spec.degree), spec.term_names

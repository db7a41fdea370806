"""Synthetic yaw-pitch comparison-score datasets.

Mated scores follow a known linear model in the sign-split covariates plus
Gaussian noise; non-mated scores are Gaussian. Every identity is compared
frontal-reference vs. each grid pose, so the output has the same layout as a
real yaw-pitch evaluation set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .biometrics import ComparisonRecord
from .covariates import covariate_matrix, term_names
from .errors import InvalidArgumentError
from .pose import FRONTAL, PoseAngles, PoseGrid, default_grid, make_grid

# Degree-1 coefficients of the pose-quality regression fitted per FR system
# (similarity change per degree).
SYSTEM_COEFFICIENTS = {
    "ArcFace": {"p-^1": 1.12e-02, "p+^1": -1.13e-02, "y-^1": 8.73e-03, "y+^1": -6.27e-03},
    "MagFace": {"p-^1": 1.14e-02, "p+^1": -1.17e-02, "y-^1": 8.76e-03, "y+^1": -6.17e-03},
    "CurricularFace": {"p-^1": 1.18e-02, "p+^1": -1.23e-02, "y-^1": 9.20e-03, "y+^1": -6.68e-03},
    "AdaFace": {"p-^1": 1.23e-02, "p+^1": -1.26e-02, "y-^1": 1.02e-02, "y+^1": -7.06e-03},
    "Cognitec": {"p-^1": 8.83e-03, "p+^1": -1.07e-02, "y-^1": 6.67e-03, "y+^1": -4.70e-03},
}

_DEGREE = re.compile(r"\^(\d+)")


def term_degree(name):
    powers = [int(m) for m in _DEGREE.findall(name)]
    if not powers:
        raise InvalidArgumentError(f"malformed term name {name!r}")
    # interaction p^k*y^k first appears at degree k + 1
    return powers[0] + 1 if "*" in name else powers[0]


@dataclass(frozen=True)
class SimulatorConfig:
    grid: PoseGrid = field(default_factory=default_grid)
    n_identities: int = 1000
    truth_coefficients: dict = field(default_factory=lambda: dict(SYSTEM_COEFFICIENTS["ArcFace"]))
    intercept: float = 1.0
    mated_noise_sd: float = 0.05
    nonmated_mean: float = 0.4
    nonmated_sd: float = 0.1
    n_nonmated: int = 1000
    seed: int = 42

    def __post_init__(self):
        if len(self.grid.cells) == 0:
            raise InvalidArgumentError("grid must not be empty")
        if int(self.n_identities) != self.n_identities or self.n_identities < 1:
            raise InvalidArgumentError("n_identities must be a positive integer")
        if int(self.n_nonmated) != self.n_nonmated or self.n_nonmated < 1:
            raise InvalidArgumentError("n_nonmated must be a positive integer")
        if not self.mated_noise_sd >= 0:
            raise InvalidArgumentError("mated_noise_sd must be >= 0")
        if not self.nonmated_sd > 0:
            raise InvalidArgumentError("nonmated_sd must be > 0")
        if not self.truth_coefficients:
            raise InvalidArgumentError("truth_coefficients must not be empty")
        known = set(term_names(self.degree))
        unknown = [k for k in self.truth_coefficients if k not in known]
        if unknown:
            raise InvalidArgumentError(f"unknown covariate terms {unknown}")

    @property
    def degree(self):
        return max(term_degree(k) for k in self.truth_coefficients)

    def with_(self, **changes):
        return replace(self, **changes)

    def to_json(self):
        return {
            "grid": {"yaw_values": list(self.grid.yaw_values), "pitch_values": list(self.grid.pitch_values)},
            "n_identities": self.n_identities,
            "truth_coefficients": dict(self.truth_coefficients),
            "intercept": self.intercept,
            "mated_noise_sd": self.mated_noise_sd,
            "nonmated_mean": self.nonmated_mean,
            "nonmated_sd": self.nonmated_sd,
            "n_nonmated": self.n_nonmated,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data):
        """Build a config; missing keys take defaults.

        ``truth_coefficients`` may be a term->coefficient map or the name of
        one of :data:`SYSTEM_COEFFICIENTS`.
        """
        data = dict(data)
        kwargs = {}
        if "grid" in data:
            g = data.pop("grid")
            kwargs["grid"] = make_grid(g["yaw_values"], g["pitch_values"])
        if "truth_coefficients" in data:
            truth = data.pop("truth_coefficients")
            if isinstance(truth, str):
                if truth not in SYSTEM_COEFFICIENTS:
                    raise InvalidArgumentError(f"unknown coefficient preset {truth!r}")
                truth = SYSTEM_COEFFICIENTS[truth]
            kwargs["truth_coefficients"] = {str(k): float(v) for k, v in truth.items()}
        for key in ("n_identities", "n_nonmated", "seed"):
            if key in data:
                kwargs[key] = int(data.pop(key))
        for key in ("intercept", "mated_noise_sd", "nonmated_mean", "nonmated_sd"):
            if key in data:
                kwargs[key] = float(data.pop(key))
        if data:
            raise InvalidArgumentError(f"unknown simulator config keys {sorted(data)}")
        return cls(**kwargs)


def expected_scores(config: SimulatorConfig, yaw, pitch):
    """Noise-free mated score for each (yaw, pitch)."""
    degree = config.degree
    names = term_names(degree)
    coef = np.array([config.truth_coefficients.get(n, 0.0) for n in names])
    return config.intercept + covariate_matrix(yaw, pitch, degree) @ coef


def _rng(seed, stream):
    return np.random.default_rng([int(seed), stream])


def simulate_mated_arrays(config: SimulatorConfig):
    """``(yaw, pitch, scores)`` arrays, identity-major, grid order within identity."""
    cells = config.grid.cells
    yaw = np.array([c.yaw_deg for c in cells])
    pitch = np.array([c.pitch_deg for c in cells])
    mean = expected_scores(config, yaw, pitch)
    noise = _rng(config.seed, 0).normal(0.0, 1.0, size=(config.n_identities, len(cells)))
    scores = mean[None, :] + config.mated_noise_sd * noise
    n = config.n_identities
    return np.tile(yaw, n), np.tile(pitch, n), scores.reshape(-1)


def simulate_mated(config: SimulatorConfig):
    yaw, pitch, scores = simulate_mated_arrays(config)
    cells = config.grid.cells
    n_cells = len(cells)
    records = []
    for k, s in enumerate(scores.tolist()):
        ident, c = divmod(k, n_cells)
        records.append(ComparisonRecord(
            reference_id=f"id{ident:05d}_frontal",
            probe_id=f"id{ident:05d}_y{cells[c].yaw_deg:g}_p{cells[c].pitch_deg:g}",
            score=s,
            mated=True,
            probe_pose=cells[c],
            reference_pose=FRONTAL,
        ))
    return records


def simulate_nonmated(config: SimulatorConfig):
    return _rng(config.seed, 1).normal(config.nonmated_mean, config.nonmated_sd, size=config.n_nonmated).tolist()


def simulate_nonmated_records(config: SimulatorConfig):
    return [
        ComparisonRecord(
            reference_id=f"nm{k:05d}_a",
            probe_id=f"nm{k:05d}_b",
            score=s,
            mated=False,
            probe_pose=FRONTAL,
            reference_pose=FRONTAL,
        )
        for k, s in enumerate(simulate_nonmated(config))
    ]


def simulate(config: SimulatorConfig):
    """Mated followed by non-mated records."""
    return simulate_mated(config) + simulate_nonmated_records(config)

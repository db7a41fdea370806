"""CSV/JSON readers and writers for scores, poses, estimates, models and curves."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .biometrics import ComparisonRecord
from .covariates import CovariateSpec
from .errors import FormatError, IncompatibleModelError, InvalidArgumentError, RowError
from .lasso import FitStats, LassoModel
from .pose import PoseAngles, PoseEstimate, ReannotationTable
from .quality import Calibration

FORMAT_VERSION = 1

SCORE_REQUIRED = ("reference_id", "probe_id", "mated", "score")
SCORE_OPTIONAL = ("ref_yaw", "ref_pitch", "probe_yaw", "probe_pitch", "ref_quality", "probe_quality")
ESTIMATE_COLUMNS = ("sample_id", "nominal_yaw", "nominal_pitch", "est_yaw", "est_pitch")
POSE_REQUIRED = ("sample_id", "yaw", "pitch")
POSE_OPTIONAL = ("roll",)
QUALITY_COLUMNS = ("sample_id", "yaw", "pitch", "iso_quality", "syp_quality")
SURFACE_COLUMNS = ("pitch", "yaw", "metric", "value")
EDC_COLUMNS = ("discard_fraction", "fnmr")


def fmt(x):
    """Shortest round-trip decimal text for a float; ints stay ints."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_header(path, required, optional=()):
    path = Path(path)
    f = open(path, newline="")
    reader = csv.reader(f)
    try:
        header = next(reader)
    except StopIteration:
        f.close()
        raise FormatError(f"{path}: empty file, expected header {','.join(required)}") from None
    header = [h.strip() for h in header]
    unknown = [h for h in header if h not in required and h not in optional]
    if unknown:
        f.close()
        raise FormatError(f"{path}: unknown column(s) {', '.join(unknown)}")
    missing = [h for h in required if h not in header]
    if missing:
        f.close()
        raise FormatError(f"{path}: header lacks required column(s) {', '.join(missing)}")
    if len(set(header)) != len(header):
        f.close()
        raise FormatError(f"{path}: duplicate column names in header")
    return f, reader, header


def _float(text, name):
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{name}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ValueError(f"{name}: non-finite value {text!r}")
    return value


def _quality(text, name):
    try:
        value = int(text)
    except ValueError:
        raise ValueError(f"{name}: {text!r} is not an integer") from None
    if not 0 <= value <= 100:
        raise ValueError(f"{name}: {value} outside [0, 100]")
    return value


def _pose(row, yaw_col, pitch_col):
    yaw, pitch = row.get(yaw_col, ""), row.get(pitch_col, "")
    if yaw == "" and pitch == "":
        return None
    if yaw == "" or pitch == "":
        raise ValueError(f"{yaw_col}/{pitch_col}: both or neither must be given")
    try:
        return PoseAngles(_float(yaw, yaw_col), _float(pitch, pitch_col))
    except InvalidArgumentError as e:
        raise ValueError(f"{yaw_col}/{pitch_col}: {e}") from None


def _rows(path, reader, header):
    for line, values in enumerate(reader, start=2):
        if not values or all(v.strip() == "" for v in values):
            continue
        if len(values) != len(header):
            yield line, None, f"expected {len(header)} fields, got {len(values)}"
            continue
        yield line, dict(zip(header, (v.strip() for v in values))), None


@dataclass
class Dataset:
    records: list
    nonmated_scores: list
    source_manifest: dict = field(default_factory=dict)

    @property
    def mated(self):
        return [r for r in self.records if r.mated]


def _parse_score_row(row):
    mated = row["mated"]
    if mated not in ("0", "1"):
        raise ValueError(f"mated: expected 0 or 1, got {mated!r}")
    if row["reference_id"] == "" or row["probe_id"] == "":
        raise ValueError("reference_id/probe_id must not be empty")
    return ComparisonRecord(
        reference_id=row["reference_id"],
        probe_id=row["probe_id"],
        score=_float(row["score"], "score"),
        mated=mated == "1",
        probe_pose=_pose(row, "probe_yaw", "probe_pitch"),
        reference_pose=_pose(row, "ref_yaw", "ref_pitch"),
        probe_quality=_quality(row["probe_quality"], "probe_quality") if row.get("probe_quality", "") != "" else None,
        reference_quality=_quality(row["ref_quality"], "ref_quality") if row.get("ref_quality", "") != "" else None,
    )


def load_scores(path) -> Dataset:
    """Parse a comparison-score CSV. Every bad row is reported; none are skipped."""
    f, reader, header = _read_header(path, SCORE_REQUIRED, SCORE_OPTIONAL)
    records, problems = [], []
    with f:
        for line, row, err in _rows(path, reader, header):
            if err:
                problems.append((line, err))
                continue
            try:
                records.append(_parse_score_row(row))
            except ValueError as e:
                problems.append((line, str(e)))
    if problems:
        raise RowError(path, problems)
    nonmated = [r.score for r in records if not r.mated]
    manifest = {
        "paths": [str(path)],
        "row_counts": {"total": len(records), "mated": len(records) - len(nonmated), "nonmated": len(nonmated)},
        "sha256": _sha256(path),
    }
    return Dataset(records, nonmated, manifest)


def write_scores(path, records):
    records = list(records)
    cols = list(SCORE_REQUIRED)
    if any(r.reference_pose is not None for r in records):
        cols += ["ref_yaw", "ref_pitch"]
    if any(r.probe_pose is not None for r in records):
        cols += ["probe_yaw", "probe_pitch"]
    if any(r.reference_quality is not None for r in records):
        cols.append("ref_quality")
    if any(r.probe_quality is not None for r in records):
        cols.append("probe_quality")
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            row = {
                "reference_id": r.reference_id, "probe_id": r.probe_id,
                "mated": "1" if r.mated else "0", "score": fmt(r.score),
                "ref_yaw": fmt(r.reference_pose.yaw_deg) if r.reference_pose else "",
                "ref_pitch": fmt(r.reference_pose.pitch_deg) if r.reference_pose else "",
                "probe_yaw": fmt(r.probe_pose.yaw_deg) if r.probe_pose else "",
                "probe_pitch": fmt(r.probe_pose.pitch_deg) if r.probe_pose else "",
                "ref_quality": fmt(r.reference_quality), "probe_quality": fmt(r.probe_quality),
            }
            w.writerow([row[c] for c in cols])


def load_poses(path):
    """Read ``sample_id,yaw,pitch[,roll]``; returns ``[(sample_id, PoseAngles), ...]``."""
    f, reader, header = _read_header(path, POSE_REQUIRED, POSE_OPTIONAL)
    out, problems = [], []
    with f:
        for line, row, err in _rows(path, reader, header):
            if err:
                problems.append((line, err))
                continue
            try:
                pose = _pose(row, "yaw", "pitch")
                if pose is None:
                    raise ValueError("yaw/pitch missing")
                if row.get("roll", "") != "":
                    pose = PoseAngles(pose.yaw_deg, pose.pitch_deg, _float(row["roll"], "roll"))
                out.append((row["sample_id"], pose))
            except (ValueError, InvalidArgumentError) as e:
                problems.append((line, str(e)))
    if problems:
        raise RowError(path, problems)
    return out


def write_poses(path, samples):
    samples = list(samples)
    with_roll = any(p.roll_deg is not None for _, p in samples)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(POSE_REQUIRED) + (["roll"] if with_roll else []))
        for sid, p in samples:
            row = [sid, fmt(p.yaw_deg), fmt(p.pitch_deg)]
            if with_roll:
                row.append(fmt(p.roll_deg))
            w.writerow(row)


def load_estimates(path):
    f, reader, header = _read_header(path, ESTIMATE_COLUMNS)
    out, problems = [], []
    with f:
        for line, row, err in _rows(path, reader, header):
            if err:
                problems.append((line, err))
                continue
            try:
                nominal = _pose(row, "nominal_yaw", "nominal_pitch")
                est = _pose(row, "est_yaw", "est_pitch")
                if nominal is None or est is None:
                    raise ValueError("nominal and estimated angles are required")
                out.append(PoseEstimate(nominal, est, row["sample_id"]))
            except ValueError as e:
                problems.append((line, str(e)))
    if problems:
        raise RowError(path, problems)
    return out


def write_estimates(path, estimates):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ESTIMATE_COLUMNS)
        for e in estimates:
            w.writerow([e.sample_id, fmt(e.nominal.yaw_deg), fmt(e.nominal.pitch_deg),
                        fmt(e.estimated.yaw_deg), fmt(e.estimated.pitch_deg)])


def _dump_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, allow_nan=False) + "\n")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: malformed JSON ({e})") from None


def save_table(table: ReannotationTable, path):
    _dump_json(path, {"format_version": FORMAT_VERSION, **table.to_json()})


def load_table(path) -> ReannotationTable:
    data = _load_json(path)
    try:
        return ReannotationTable.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path}: bad re-annotation table ({e})") from None


def model_to_json(model: LassoModel, calibration: Calibration = None):
    data = {
        "format_version": FORMAT_VERSION,
        "spec": {"degree": model.spec.degree},
        "lambda": model.lam,
        "intercept": model.intercept,
        "terms": [{"name": n, "coef": c} for n, c in zip(model.term_names, model.coefficients.tolist())],
        "fit_stats": {
            "iterations": model.fit_stats.iterations,
            "final_objective": model.fit_stats.final_objective,
            "converged": model.fit_stats.converged,
        },
    }
    if calibration is not None:
        data["calibration"] = {"s_floor": calibration.s_floor, "s_ceil": calibration.s_ceil}
    return data


def model_from_json(data):
    if not isinstance(data, dict):
        raise FormatError("model file must hold a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise IncompatibleModelError(f"model format_version {version!r}, expected {FORMAT_VERSION}")
    try:
        spec = CovariateSpec(int(data["spec"]["degree"]))
        terms = data["terms"]
        names = tuple(t["name"] for t in terms)
        coefs = [float(t["coef"]) for t in terms]
        stats = data.get("fit_stats", {})
        model = LassoModel(
            coefficients=np.array(coefs),
            intercept=float(data["intercept"]),
            lam=float(data["lambda"]),
            spec=spec,
            term_names=names,
            fit_stats=FitStats(int(stats.get("iterations", 0)), float(stats.get("final_objective", 0.0)),
                               bool(stats.get("converged", True))),
        )
        cal = data.get("calibration")
        calibration = Calibration(float(cal["s_floor"]), float(cal["s_ceil"])) if cal else None
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed model: missing or invalid field {e}") from None
    return model, calibration


def save_model(model: LassoModel, calibration, path):
    _dump_json(path, model_to_json(model, calibration))


def load_model(path):
    return model_from_json(_load_json(path))


def write_quality(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(QUALITY_COLUMNS)
        for sid, pose, iso, syp in rows:
            w.writerow([sid, fmt(pose.yaw_deg), fmt(pose.pitch_deg), iso, syp])


def write_surface(stream, surface):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SURFACE_COLUMNS)
    for pitch, yaw, metric, value in surface.rows():
        w.writerow([fmt(pitch), fmt(yaw), metric, fmt(value)])


def write_edc(path, curve, pauc_value):
    """Curve CSV plus a JSON sidecar next to it (same stem, ``.json``)."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EDC_COLUMNS)
        for x, y in curve.points:
            w.writerow([fmt(x), fmt(y)])
    sidecar = path.with_suffix(".json")
    _dump_json(sidecar, {
        "threshold": curve.threshold,
        "fmr_target": curve.fmr_target,
        f"pauc@{curve.max_discard:.2f}": pauc_value,
    })
    return sidecar


def load_edc(path):
    f, reader, header = _read_header(path, EDC_COLUMNS)
    with f:
        pts = [(float(r["discard_fraction"]), float(r["fnmr"])) for _, r, _ in _rows(path, reader, header) if r]
    return pts

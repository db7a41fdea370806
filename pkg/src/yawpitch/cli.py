"""Command-line interface.

Exit codes: 0 success, 1 data/model error (JSON report on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .biometrics import METRICS, ScoreSet, compute_metric, surface_grid
from .covariates import CovariateSpec, covariate_matrix
from .edc import edc_from_arrays, pauc
from .errors import InvalidArgumentError, MissingCalibrationError, YawPitchError
from .lasso import DEFAULT_LAMBDA, FitOptions, adjusted_r2, fit
from .pose import PoseAngles, build_reannotation_table, reannotate
from .quality import calibrate, iso_fused, iso_fused_array, syp_quality, syp_quality_array
from .simulator import SimulatorConfig, simulate


def _pose_arrays(records, attr):
    poses = [getattr(r, attr) for r in records]
    if any(p is None for p in poses):
        raise InvalidArgumentError(f"every mated comparison needs {attr.replace('_', ' ')} angles")
    return np.array([p.yaw_deg for p in poses]), np.array([p.pitch_deg for p in poses])


def cmd_fit(args, out):
    data = io.load_scores(args.scores)
    rows = [r for r in data.records if r.mated and r.probe_pose is not None]
    if not rows:
        raise InvalidArgumentError("no mated comparisons with probe poses to fit on")
    yaw, pitch = _pose_arrays(rows, "probe_pose")
    targets = np.array([r.score for r in rows])
    spec = CovariateSpec(args.degree)
    design = covariate_matrix(yaw, pitch, spec.degree)
    options = FitOptions(lam=args.lam, max_sweeps=args.max_sweeps, tolerance=args.tolerance)
    model = fit(design, targets, options, spec)
    training = {r.probe_pose.key: r.probe_pose for r in rows}.values()
    cal = calibrate(model, training)
    io.save_model(model, cal, args.out)
    try:
        r2 = adjusted_r2(model, design, targets)
    except InvalidArgumentError:
        r2 = None
    summary = {
        "model": str(args.out),
        "n": len(targets),
        "terms": len(model.term_names),
        "adjusted_r2": r2,
        "converged": model.fit_stats.converged,
        "iterations": model.fit_stats.iterations,
        "calibration": {"s_floor": cal.s_floor, "s_ceil": cal.s_ceil},
    }
    out.write(json.dumps(summary) + "\n")


def cmd_quality(args, out):
    model, cal = io.load_model(args.model)
    if cal is None:
        raise MissingCalibrationError(f"{args.model} carries no calibration")
    samples = io.load_poses(args.poses)
    rows = [(sid, p, iso_fused(p), syp_quality(model, cal, p)) for sid, p in samples]
    io.write_quality(args.out, rows)


def cmd_evaluate(args, out):
    data = io.load_scores(args.scores)
    if args.by_cell:
        surface = surface_grid(data.records, data.nonmated_scores, args.metric, args.target)
        if args.out:
            with open(args.out, "w", newline="") as f:
                io.write_surface(f, surface)
        else:
            io.write_surface(out, surface)
        return
    scores = ScoreSet.from_records(data.records)
    out.write(io.fmt(compute_metric(scores, args.metric, args.target)) + "\n")


def _qualities(args, mated):
    if args.model:
        model, cal = io.load_model(args.model)
        if cal is None:
            raise MissingCalibrationError(f"{args.model} carries no calibration")
        ref = syp_quality_array(model, cal, *_pose_arrays(mated, "reference_pose"))
        probe = syp_quality_array(model, cal, *_pose_arrays(mated, "probe_pose"))
        return ref, probe
    if args.quality_column == "iso_quality":
        return (iso_fused_array(*_pose_arrays(mated, "reference_pose")),
                iso_fused_array(*_pose_arrays(mated, "probe_pose")))
    ref = [r.reference_quality for r in mated]
    probe = [r.probe_quality for r in mated]
    if any(q is None for q in ref) or any(q is None for q in probe):
        raise InvalidArgumentError("quality column requested but some mated rows lack ref_quality/probe_quality")
    return np.array(ref), np.array(probe)


def cmd_edc(args, out):
    data = io.load_scores(args.scores)
    mated = data.mated
    if not mated:
        raise InvalidArgumentError("no mated comparisons")
    ref_q, probe_q = _qualities(args, mated)
    curve = edc_from_arrays([r.score for r in mated], ref_q, probe_q, data.nonmated_scores,
                            args.fmr_target, args.max_discard)
    area = pauc(curve, args.max_discard)
    io.write_edc(args.out, curve, area)
    out.write(json.dumps({"pauc": area, "threshold": curve.threshold, "points": len(curve.points)}) + "\n")


def cmd_reannotate(args, out):
    if args.estimates:
        table = build_reannotation_table(io.load_estimates(args.estimates))
        io.save_table(table, args.out)
        return
    table = io.load_table(args.apply)
    if args.poses:
        samples = io.load_poses(args.poses)
        io.write_poses(args.out, [(sid, reannotate(table, p)) for sid, p in samples])
        return
    data = io.load_scores(args.scores)
    fixed = []
    for r in data.records:
        fixed.append(type(r)(
            r.reference_id, r.probe_id, r.score, r.mated,
            reannotate(table, r.probe_pose) if r.probe_pose else None,
            reannotate(table, r.reference_pose) if r.reference_pose else None,
            r.probe_quality, r.reference_quality,
        ))
    io.write_scores(args.out, fixed)


def cmd_simulate(args, out):
    raw = {}
    if args.config:
        raw = json.loads(open(args.config).read())
    config = SimulatorConfig.from_json(raw)
    if args.seed is not None:
        config = config.with_(seed=args.seed)
    io.write_scores(args.out, simulate(config))


def _target(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="yawpitch", description="Head-pose quality estimation and benchmarking.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit the pose-quality regression on mated scores")
    f.add_argument("--scores", required=True)
    f.add_argument("--degree", type=int, default=2)
    f.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    f.add_argument("--max-sweeps", type=int, default=10_000)
    f.add_argument("--tolerance", type=float, default=1e-10)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    q = sub.add_parser("quality", help="ISO and regression quality for a pose list")
    q.add_argument("--model", required=True)
    q.add_argument("--poses", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_quality)

    e = sub.add_parser("evaluate", help="EER / FNMR@FMR / FMR@FNMR, overall or per pose cell")
    e.add_argument("--scores", required=True)
    e.add_argument("--metric", choices=METRICS, required=True)
    e.add_argument("--target", type=_target, default=0.01)
    e.add_argument("--by-cell", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    d = sub.add_parser("edc", help="error-vs-discard curve and partial AUC")
    d.add_argument("--scores", required=True)
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--quality-column", choices=("quality", "iso_quality"),
                     help="'quality': ref_quality/probe_quality columns; 'iso_quality': cos^2 baseline from poses")
    src.add_argument("--model", help="regression model JSON; quality from poses")
    d.add_argument("--fmr-target", type=_target, default=0.01)
    d.add_argument("--max-discard", type=float, default=0.2)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_edc)

    r = sub.add_parser("reannotate", help="build or apply a pose re-annotation table")
    mode = r.add_mutually_exclusive_group(required=True)
    mode.add_argument("--estimates")
    mode.add_argument("--apply", metavar="TABLE")
    inp = r.add_mutually_exclusive_group()
    inp.add_argument("--poses")
    inp.add_argument("--scores")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reannotate)

    s = sub.add_parser("simulate", help="write a synthetic comparison-score CSV")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "reannotate" and args.apply and not (args.poses or args.scores):
        err.write("yawpitch reannotate: --apply needs --poses or --scores\n")
        return 2
    try:
        args.func(args, out)
    except YawPitchError as e:
        report = {"error": type(e).__name__, "message": str(e)}
        problems = getattr(e, "problems", None)
        if problems:
            report["problems"] = [{"line": n, "message": m} for n, m in problems]
        err.write(json.dumps(report) + "\n")
        return 1
    except (OSError, json.JSONDecodeError) as e:
        err.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line harness: ``normalfan <job> --config PATH [--out DIR] [--threads N]``.

Each job reads one JSON config (see :mod:`normalfan.config`) and writes CSV
for tabular data and JSON for structured results. Output depends only on the
config; ``--threads`` changes speed, never content.
"""
import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, parse_config
from .curvature import curvature_spectrum, singular_locus_diagnostic
from .errors import ConfigInvalid, NormalFanError, PreconditionViolated, WitnessNotFound
from .normals import find_normals
from .oracle import brute_force_normals, confirms_witness
from .sphere import random_directions
from .sweep import SweepSpec, run_sweep, verify_theorem

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_NO_WITNESS = 3
EXIT_CONFIG = 64

OUTCOME_WITNESS = "witness"
OUTCOME_PRECONDITION = "precondition_violated"
OUTCOME_NOT_FOUND = "witness_not_found"


def _floats(a):
    return [float(c) for c in np.ravel(a)]


def fan_record(fan):
    return {
        "y": _floats(fan.y),
        "count": int(fan.count),
        "index_counts": [int(c) for c in fan.index_counts()],
        "morse_valid": bool(fan.morse_valid),
        "points": [{"v": _floats(cp.direction), "foot": _floats(cp.foot),
                    "t": float(cp.signed_distance), "index": int(cp.morse_index),
                    "residual": float(cp.residual), "degenerate": bool(cp.degenerate)}
                   for cp in fan.critical_points],
    }


def profile_record(profile):
    return {
        "x": _floats(profile.x),
        "u": _floats(profile.u),
        "radii": _floats(profile.radii_at_x.radii),
        "events": [{"t": float(e.t_star), "kind": e.kind, "sheet": int(e.sheet),
                    "at_tracked_point": bool(e.at_tracked_point),
                    "bracket": _floats(e.bracket)} for e in profile.events],
        "intervals": [{"t_lo": float(iv.t_lo), "t_hi": float(iv.t_hi),
                       "counts": list(iv.counts), "N": int(iv.N),
                       "tracked_index": iv.tracked_index} for iv in profile.intervals],
    }


def witness_record(w):
    return {
        "z": _floats(w.z),
        "t_witness": float(w.t_witness),
        "window": _floats(w.window),
        "x": _floats(w.x),
        "u": _floats(w.u),
        "feet": fan_record(w.feet),
        "profile": profile_record(w.profile),
    }


def _dump(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _name(cfg, default):
    return f"{cfg.prefix}_{default}" if cfg.prefix else default


# -- jobs ------------------------------------------------------------------

def run_curvature(cfg, out, threads):
    body = cfg.body()
    n = body.dimension
    if cfg.directions is not None:
        V = np.array(cfg.directions)
    else:
        V = random_directions(cfg.sample_count, n, seed=cfg.rng_seed)
    rows = []
    for v in V:
        spec = curvature_spectrum(body, v)
        rows.append([repr(float(c)) for c in v] + [repr(float(r)) for r in spec.radii]
                    + [repr(float(spec.min_gap))])
    header = [f"v_{i + 1}" for i in range(n)] + [f"r_{i + 1}" for i in range(n - 1)] + ["min_gap"]
    path = out / _name(cfg, "curvature.csv")
    _csv(path, header, rows)
    return EXIT_OK, f"wrote {len(rows)} spectra to {path}"


def run_normals(cfg, out, threads):
    body = cfg.body()
    fan = find_normals(body, np.array(cfg.y), cfg.normal_options())
    path = out / _name(cfg, "normals.json")
    _dump(path, fan_record(fan))
    return EXIT_OK, f"{fan.count} normals through y, written to {path}"


def run_oracle(cfg, out, threads):
    body = cfg.body()
    y = np.array(cfg.y)
    seed = cfg.rng_seed if cfg.rng_seed is not None else 12345
    grid = brute_force_normals(body, y, cfg.grid_resolution, seed=seed)
    rec = {"y": _floats(y), "count": grid.count, "grid_resolution": cfg.grid_resolution,
           "spacing": float(grid.spacing),
           "points": [{"v": _floats(c.direction), "predicted": _floats(c.predicted),
                       "cells": int(c.cell_count), "residual": float(c.min_residual)}
                      for c in grid.clusters]}
    path = out / _name(cfg, "oracle.json")
    _dump(path, rec)
    return EXIT_OK, f"{grid.count} grid clusters, written to {path}"


def run_sweep_job(cfg, out, threads):
    body = cfg.body()
    n = body.dimension
    kw = {"x_dir": np.array(cfg.x_dir), "t_range": cfg.t_range}
    if cfg.t_samples is not None:
        kw["t_samples"] = cfg.t_samples
    try:
        profile = run_sweep(body, SweepSpec(**kw), cfg.sweep_options(threads))
    except PreconditionViolated as exc:
        return EXIT_PRECONDITION, f"precondition violated: {exc}"
    header = ["t", "N"] + [f"C_{k}" for k in range(n)] + ["tracked_index"]
    rows = [[repr(s.t), s.N] + list(s.counts) + [s.tracked_index] for s in profile.samples]
    path = out / _name(cfg, "sweep.csv")
    _csv(path, header, rows)
    _dump(out / _name(cfg, "sweep_profile.json"), profile_record(profile))
    return EXIT_OK, f"{len(profile.events)} events along the normal, samples in {path}"


def run_verify(cfg, out, threads):
    body = cfg.body()
    path = out / _name(cfg, "verify.json")
    try:
        w = verify_theorem(body, np.array(cfg.x_dir), cfg.verify_options(threads))
    except PreconditionViolated as exc:
        _dump(path, {"outcome": OUTCOME_PRECONDITION, "message": str(exc)})
        return EXIT_PRECONDITION, f"precondition violated: {exc}"
    except WitnessNotFound as exc:
        rec = {"outcome": OUTCOME_NOT_FOUND, "message": str(exc)}
        if exc.profile is not None:
            rec["profile"] = profile_record(exc.profile)
        if exc.verdict is not None:
            rec["refutation_trace"] = list(exc.verdict.refutation_trace)
            rec["violations"] = list(exc.verdict.violations)
        _dump(path, rec)
        return EXIT_NO_WITNESS, f"no witness: {exc}"
    _dump(path, {"outcome": OUTCOME_WITNESS, **witness_record(w)})
    return EXIT_OK, f"witness at t = {w.t_witness:.12g} with {w.feet.count} feet, written to {path}"


def _batch_sample(body, cfg, index, u):
    rec = {"index": index, "x_dir": _floats(u)}
    radii = curvature_spectrum(body, u).radii
    rec["radii"] = _floats(radii)
    diag = singular_locus_diagnostic(body, u)
    rec["min_gap"] = float(diag.min_gap)
    if diag.multiplicity_flag:
        rec["outcome"] = OUTCOME_PRECONDITION
        return rec
    try:
        w = verify_theorem(body, u, cfg.verify_options())
    except WitnessNotFound as exc:
        rec["outcome"] = OUTCOME_NOT_FOUND
        rec["message"] = str(exc)
        if exc.verdict is not None:
            rec["violations"] = list(exc.verdict.violations)
        return rec
    except NormalFanError as exc:
        rec["outcome"] = OUTCOME_NOT_FOUND
        rec["message"] = f"{type(exc).__name__}: {exc}"
        return rec
    r1, rn = float(radii[0]), float(radii[-1])
    rec["outcome"] = OUTCOME_WITNESS
    rec["t_witness"] = float(w.t_witness)
    rec["t_over_width"] = float(w.t_witness / (rn - r1))
    rec["window_position"] = float((w.t_witness - r1) / (rn - r1))
    rec["z"] = _floats(w.z)
    rec["feet"] = fan_record(w.feet)["points"]
    rec["unresolved_events"] = sum(e.kind == "Unresolved" for e in w.profile.events)
    if cfg.oracle_confirm:
        grid = brute_force_normals(body, w.z, cfg.grid_resolution)
        rec["oracle_count"] = grid.count
        rec["oracle_confirmed"] = bool(confirms_witness(w.feet, grid))
    return rec


def _stats(values):
    if not values:
        return None
    a = np.array(values)
    return {"mean": float(a.mean()), "median": float(np.median(a)),
            "min": float(a.min()), "max": float(a.max())}


def batch_report(cfg, samples):
    outcomes = [s["outcome"] for s in samples]
    counts = {k: outcomes.count(k) for k in (OUTCOME_WITNESS, OUTCOME_PRECONDITION,
                                            OUTCOME_NOT_FOUND)}
    accepted = counts[OUTCOME_WITNESS] + counts[OUTCOME_NOT_FOUND]
    wit = [s for s in samples if s["outcome"] == OUTCOME_WITNESS]
    report = {
        "body": cfg.body_spec,
        "rng_seed": cfg.rng_seed,
        "sample_count": len(samples),
        "outcome_counts": counts,
        "accepted": accepted,
        "success_fraction": counts[OUTCOME_WITNESS] / accepted if accepted else None,
        "t_over_width": _stats([s["t_over_width"] for s in wit]),
        "window_position": _stats([s["window_position"] for s in wit]),
    }
    if cfg.oracle_confirm:
        report["oracle_confirmed"] = sum(s.get("oracle_confirmed", False) for s in wit)
    report["samples"] = samples
    return report


def run_batch_verify(cfg, out, threads):
    body = cfg.body()
    U = random_directions(cfg.sample_count, body.dimension, seed=cfg.rng_seed)
    work = lambda i: _batch_sample(body, cfg, i, U[i])  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            samples = list(pool.map(work, range(len(U))))
    else:
        samples = [work(i) for i in range(len(U))]
    report = batch_report(cfg, samples)
    path = out / _name(cfg, "batch_report.json")
    _dump(path, report)
    c = report["outcome_counts"]
    return EXIT_OK, (f"{c[OUTCOME_WITNESS]} witnesses, {c[OUTCOME_NOT_FOUND]} not found, "
                     f"{c[OUTCOME_PRECONDITION]} excluded; report in {path}")


JOB_RUNNERS = {
    "curvature": run_curvature,
    "normals": run_normals,
    "oracle": run_oracle,
    "sweep": run_sweep_job,
    "verify": run_verify,
    "batch_verify": run_batch_verify,
}


def run_job(cfg: ExperimentConfig, out_dir=None, threads=1):
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    return JOB_RUNNERS[cfg.job](cfg, out, threads)


def build_parser():
    parser = argparse.ArgumentParser(prog="normalfan",
                                     description="Concurrent normals of convex bodies.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("curvature", "normals", "oracle", "sweep", "verify", "batch-verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")
        p.add_argument("--threads", type=int, default=1, help="worker threads (speed only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    job = args.command.replace("-", "_")
    try:
        if args.threads < 1:
            raise ConfigInvalid("--threads must be at least 1")
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config(data, job)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, message = run_job(cfg, args.out, args.threads)
    print(message)
    return code


if __name__ == "__main__":
    sys.exit(main())

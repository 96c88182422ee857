"""Command-line harness for benchmarks, one-shot alignment, and scene export.

Subcommands: bench-noise, bench-outliers, bench-robust, bench-icp, solve,
gen.  Benchmark flags can also come from a JSON config file (``--config``);
explicit flags override file values.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..geometry import Pose
from ..icp import IcpParams, icp_align
from .ply_io import load_ply, save_ply
from .runner import (
    BenchConfig,
    run_icp_benchmark,
    run_noise_benchmark,
    run_outlier_benchmark,
    run_robust_benchmark,
    write_csv,
)
from .synthetic import gen_synthetic_scene


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _add_bench_flags(sub):
    sub.add_argument("--config", help="JSON file with BenchConfig fields")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--trials", type=int)
    sub.add_argument("--solver", choices=("horn", "olae", "gn", "all"))
    sub.add_argument("--sigma", type=_float_list, metavar="S1,S2,...")
    sub.add_argument("--points", type=int)
    sub.add_argument("--planes", type=int)
    sub.add_argument("--lines", type=int)
    sub.add_argument("--outlier-ratio", type=_float_list, metavar="R1,R2,...")
    sub.add_argument("--outlier-scale", type=float)
    sub.add_argument("--st", type=float, help="scale-mismatch rejection threshold")
    sub.add_argument("--robust-delta", type=float)
    sub.add_argument("--workers", type=int)
    sub.add_argument("--model", help="PLY model for bench-icp")
    sub.add_argument("--icp-points", type=int)
    sub.add_argument("--no-fallback-model", action="store_true")
    sub.add_argument("--out", help="output CSV path")


def _config_from_args(args, experiment):
    overrides = {"experiment": experiment}
    mapping = {
        "seed": "seed",
        "trials": "trials",
        "sigma": "sigmas",
        "points": "points",
        "planes": "planes",
        "lines": "lines",
        "outlier_ratio": "outlier_ratios",
        "outlier_scale": "outlier_scale",
        "st": "s_t",
        "robust_delta": "robust_delta",
        "workers": "workers",
        "model": "model",
        "icp_points": "icp_points",
        "out": "out",
    }
    for arg_name, field in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "solver", None) is not None:
        overrides["solvers"] = (
            ("horn", "olae", "gn") if args.solver == "all" else (args.solver,)
        )
    if getattr(args, "no_fallback_model", False):
        overrides["allow_fallback_model"] = False
    if args.config:
        return BenchConfig.from_json(args.config, **overrides)
    return BenchConfig(**overrides)


def _emit(records, cfg, default_name):
    out = cfg.out or default_name
    write_csv(records, out)
    ok = sum(1 for r in records if r.status == "ok")
    print(f"wrote {len(records)} records ({ok} ok) to {out}")


def _cmd_bench_noise(args):
    cfg = _config_from_args(args, "noise")
    _emit(run_noise_benchmark(cfg), cfg, "bench_noise.csv")


def _cmd_bench_outliers(args):
    cfg = _config_from_args(args, "outliers")
    if cfg.outlier_ratios == (0.0,):
        cfg = dataclasses.replace(cfg, outlier_ratios=(0.0, 0.05, 0.1, 0.2, 0.3))
    _emit(run_outlier_benchmark(cfg), cfg, "bench_outliers.csv")


def _cmd_bench_robust(args):
    cfg = _config_from_args(args, "robust")
    if cfg.outlier_ratios == (0.0,):
        cfg = dataclasses.replace(cfg, outlier_ratios=(0.0, 0.1, 0.2, 0.3, 0.4))
    _emit(run_robust_benchmark(cfg), cfg, "bench_robust.csv")


def _cmd_bench_icp(args):
    cfg = _config_from_args(args, "icp")
    if args.trials is None and not args.config:
        cfg = dataclasses.replace(cfg, trials=10)
    _emit(run_icp_benchmark(cfg), cfg, "bench_icp.csv")


def _cmd_solve(args):
    map_a = load_ply(args.reference)
    map_b = load_ply(args.moving)
    params = IcpParams(
        solver=args.solver if args.solver != "all" else "horn",
        max_point_pair_distance=args.max_pair_distance,
        s_t=args.st,
        robust_delta=args.robust_delta,
        trust_initial_guess=args.robust_delta is not None,
    )
    result = icp_align(map_a, map_b, Pose.identity(), params)
    summary = {
        "solver": params.solver,
        "converged": result.converged,
        "iterations": result.iterations,
        "point_pairs": result.point_pairs,
        "quaternion_wxyz": [float(v) for v in result.pose.q],
        "translation": [float(v) for v in result.pose.t],
        "matrix": [[float(v) for v in row] for row in result.pose.as_matrix4()],
    }
    text = json.dumps(summary, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _cmd_gen(args):
    scene = gen_synthetic_scene(
        n_points=args.points if args.points is not None else 100,
        n_planes=args.planes or 0,
        n_lines=args.lines or 0,
        sigma=args.sigma[0] if args.sigma else 0.0,
        outlier_ratio=args.outlier_ratio[0] if args.outlier_ratio else 0.0,
        outlier_scale=args.outlier_scale or 1.0,
        seed=args.seed if args.seed is not None else 0,
    )
    prefix = Path(args.out or "scene")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    pts = scene.pairings.points
    save_ply(pts.a, f"{prefix}_a.ply")
    save_ply(pts.b, f"{prefix}_b.ply")
    meta = {
        "gt_quaternion_wxyz": [float(v) for v in scene.gt_pose.q],
        "gt_translation": [float(v) for v in scene.gt_pose.t],
        "point_outlier_indices": [int(i) for i in scene.point_outlier_indices],
        "planes_a": {
            "centroids": scene.pairings.planes.a_centroid.tolist(),
            "normals": scene.pairings.planes.a_normal.tolist(),
        },
        "planes_b": {
            "centroids": scene.pairings.planes.b_centroid.tolist(),
            "normals": scene.pairings.planes.b_normal.tolist(),
        },
    }
    Path(f"{prefix}_meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {prefix}_a.ply, {prefix}_b.ply, {prefix}_meta.json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="primalign",
        description="Multi-primitive rigid registration benchmarks and tools",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name, func, doc in (
        ("bench-noise", _cmd_bench_noise, "noise-sensitivity sweep"),
        ("bench-outliers", _cmd_bench_outliers, "scale-based outlier rejection study"),
        ("bench-robust", _cmd_bench_robust, "robust-loss weighting study"),
        ("bench-icp", _cmd_bench_icp, "full ICP trials on a model cloud"),
    ):
        sub = subs.add_parser(name, help=doc)
        _add_bench_flags(sub)
        sub.set_defaults(func=func)

    solve = subs.add_parser("solve", help="align two PLY point clouds")
    solve.add_argument("reference")
    solve.add_argument("moving")
    solve.add_argument("--solver", choices=("horn", "olae", "gn"), default="horn")
    solve.add_argument("--max-pair-distance", type=float)
    solve.add_argument("--st", type=float)
    solve.add_argument("--robust-delta", type=float)
    solve.add_argument("--out", help="write the JSON summary here too")
    solve.set_defaults(func=_cmd_solve)

    gen = subs.add_parser("gen", help="emit a synthetic scene to files")
    _add_bench_flags(gen)
    gen.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # surface errors as clean CLI diagnostics
        if isinstance(exc, (SystemExit, KeyboardInterrupt)):
            raise
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

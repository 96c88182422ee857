"""Benchmark harness: synthetic scenes, PLY I/O, experiment runners, CLI."""
from .ply_io import downsample, load_ply, save_ply
from .runner import (
    CSV_COLUMNS,
    BenchConfig,
    BenchRecord,
    run_icp_benchmark,
    run_noise_benchmark,
    run_outlier_benchmark,
    run_robust_benchmark,
    write_csv,
)
from .synthetic import SyntheticScene, fallback_model, gen_synthetic_scene, random_pose

__all__ = [
    "downsample",
    "load_ply",
    "save_ply",
    "CSV_COLUMNS",
    "BenchConfig",
    "BenchRecord",
    "run_icp_benchmark",
    "run_noise_benchmark",
    "run_outlier_benchmark",
    "run_robust_benchmark",
    "write_csv",
    "SyntheticScene",
    "fallback_model",
    "gen_synthetic_scene",
    "random_pose",
]

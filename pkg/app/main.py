"""Command-line surface: run, sweep, attack, anchors and bench."""
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional
import argparse
import logging
import os
import sys

import torch
from threadpoolctl import threadpool_limits

from .attacks import ATTACK_COLUMNS, run_attack_condition
from .config import get_settings, read_config_document, validate_config
from .errors import ConfigError, DCError
from .models.experiment import ExperimentConfig
from .pipeline import bench_scaling, build_anchor, load_pool, run_experiment, split_trial_pool
from .storage import ResultStorage

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
SWEEP_AXES = ("K", "n_a", "n_a_smote", "d_tilde")
BENCH_COLUMNS = ["method", "n_a", "fit_ms", "transform_ms", "fit_slope", "transform_slope"]
THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def configure_logging(level: str = "INFO"):
    logging.basicConfig(
        level=level.upper(),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stdout)],
        force=True,
    )


def pin_threads(threads: Optional[int]):
    """Limit BLAS, OpenMP and torch pools to `threads`; None keeps the library defaults"""
    if not threads:
        return
    for var in THREAD_ENV_VARS:
        os.environ[var] = str(threads)
    threadpool_limits(limits=threads)
    torch.set_num_threads(threads)
    logger.debug(f"Pinned numeric kernels to {threads} thread(s)")


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Experiment config JSON")
    common.add_argument("--out", default=None, help="Output directory (default: DC_OUT_DIR)")
    common.add_argument("--jobs", type=_positive_int, default=None, help="Trials run concurrently")
    common.add_argument("--bench", action="store_true", help="Single-threaded kernels and one job")
    common.add_argument("--seed-offset", type=int, default=0, help="Added to the config seed")

    parser = argparse.ArgumentParser(prog="dc", description="Data collaboration experiments")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("run", parents=[common], help="Run every configured method")
    sweep = commands.add_parser("sweep", parents=[common], help="Repeat the run across one axis")
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument("--values", type=int, nargs="*", default=[])
    commands.add_parser("attack", parents=[common], help="Reconstruction attacks on leaked anchors")
    commands.add_parser("anchors", parents=[common], help="Write the anchor set of the first trial")
    bench = commands.add_parser("bench", parents=[common], help="Timing scaling over anchor sizes")
    bench.add_argument("--n-a", dest="n_a", type=_positive_int, nargs="*", default=None)
    return parser


def command_overrides(raw: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {"seed": raw.get("seed", 0) + args.seed_offset}
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.bench:
        overrides["jobs"] = 1
    return {**raw, **overrides}


def cmd_run(config: ExperimentConfig, storage: ResultStorage, threads: Optional[int] = None):
    manifest = storage.new_manifest(threads)
    summary = run_experiment(config)
    storage.store_trials(summary)
    storage.store_timings(summary)
    manifest = manifest.model_copy(update={"trials": summary.trials, "finished_at": datetime.now(timezone.utc)})
    storage.store_summary(summary, manifest)
    return summary


def cmd_sweep(
    raw: Dict[str, Any],
    axis: str,
    values: List[int],
    storage: ResultStorage,
    bench: bool = False,
):
    if not values:
        raise ConfigError(f"Sweep over '{axis}' needs at least one value")
    rows = []
    for value in values:
        summary = run_experiment(validate_config({**raw, axis: value}, source=f"sweep {axis}={value}"))
        rows.extend(
            {"axis": axis, "value": value, "method": s.method.value, "mean": s.mean, "ci": s.ci}
            for s in summary.methods
        )
    storage.store_table("sweep.csv", rows, ["axis", "value", "method", "mean", "ci"])
    if bench and axis == "n_a":
        cmd_bench(storage.config, storage, values)
    return rows


def cmd_attack(config: ExperimentConfig, storage: ResultStorage):
    pool = load_pool(config)
    rows = [
        run_attack_condition(config, obfuscator, d_tilde, config.seed + r, pool)
        for obfuscator in config.attack_obfuscators
        for d_tilde in config.attack_d_tildes
        for r in range(config.n_seed)
    ]
    storage.store_table("attack.csv", rows, ATTACK_COLUMNS)
    return rows


def cmd_anchors(config: ExperimentConfig, storage: ResultStorage):
    _, source = split_trial_pool(config, load_pool(config), config.seed)
    anchor = build_anchor(config, source, config.seed)
    storage.store_anchors(anchor)
    return anchor


def cmd_bench(config: ExperimentConfig, storage: ResultStorage, n_a_list: Optional[List[int]] = None):
    rows = bench_scaling(config, n_a_list or config.bench_n_a, pool=load_pool(config))
    storage.store_table("bench.csv", [r.model_dump(mode="json") for r in rows], BENCH_COLUMNS)
    return rows


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging(settings.log_level)
    threads = 1 if args.bench else settings.threads
    pin_threads(threads)

    try:
        raw = command_overrides(read_config_document(args.config), args)
        config = validate_config(raw, source=args.config)
        storage = ResultStorage(args.out or settings.out_dir, config)
        logger.info(f"Command '{args.command}' with config {args.config} (hash {storage.config_hash[:12]})")

        if args.command == "run":
            cmd_run(config, storage, threads)
        elif args.command == "sweep":
            cmd_sweep(raw, args.axis, args.values, storage, bench=args.bench)
        elif args.command == "attack":
            cmd_attack(config, storage)
        elif args.command == "anchors":
            cmd_anchors(config, storage)
        elif args.command == "bench":
            cmd_bench(config, storage, args.n_a)
    except DCError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        return 2
    return 0

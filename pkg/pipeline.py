# pipeline.py
# ---------------------------------------------------------
# CLI entrypoint for benchmark runs.
#
#   python pipeline.py run [CONFIG] [--preset fig4|fig5|ci]
#                          [--seed N] [--threads N] [--out DIR]
#
# Responsibilities:
#   - Parse CLI arguments
#   - Layer config: defaults < preset < CONFIG < flags
#   - Trigger the main Prefect flow
#   - Map failures onto exit codes
#
# Exit codes: 0 ok, 2 config error, 3 singular system, 4 I/O error.
#
# Logging:
#   Module logger name: pipeline
# ---------------------------------------------------------

from __future__ import annotations

import argparse
import sys

from bench.spec import ExperimentSpec, build_experiment_spec
from flows.main_pipeline import main_pipeline_flow
from util.config_loader import PRESETS, deep_merge, load_layered
from util.errors import ConfigError, SingularSystemError
from util.logger import get_logger

logger = get_logger("pipeline")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are config errors (exit 2), not argparse's SystemExit."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="pipeline.py", description="RIS cell-free channel estimation benchmarks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    run = sub.add_parser("run", help="run an NMSE sweep")
    run.add_argument("config_file", nargs="?", help="experiment YAML file")
    run.add_argument("--preset", choices=PRESETS, help="shipped preset applied before CONFIG")
    run.add_argument("--seed", type=int, help="master seed (scenario.rng_seed)")
    run.add_argument("--threads", type=int, help="trial worker threads")
    run.add_argument("--out", help="output directory")
    return parser


def resolve_spec(args: argparse.Namespace) -> ExperimentSpec:
    if not args.config_file and not args.preset:
        raise ConfigError("give a config file, a --preset, or both")

    cfg = load_layered(args.config_file, args.preset)
    overrides: dict = {}
    if args.seed is not None:
        overrides.setdefault("scenario", {})["rng_seed"] = args.seed
    if args.threads is not None:
        overrides.setdefault("experiment", {})["threads"] = args.threads
    if args.out is not None:
        overrides.setdefault("experiment", {})["output_path"] = args.out
    return build_experiment_spec(deep_merge(cfg, overrides))


def main(argv: list[str] | None = None) -> int:
    logger.info("Starting benchmark CLI entrypoint")

    # -----------------------------------------------------
    # Parse arguments and build the experiment
    # -----------------------------------------------------
    try:
        args = build_parser().parse_args(argv)
        spec = resolve_spec(args)
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG

    logger.info(
        f"Experiment '{spec.name}': seed={spec.scenario.rng_seed}, threads={spec.threads}, out={spec.output_path}"
    )

    # -----------------------------------------------------
    # Execute main flow (Prefect)
    # -----------------------------------------------------
    try:
        main_pipeline_flow(spec)
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG
    except SingularSystemError as exc:
        logger.error(f"Numerical failure in {exc.block or 'least squares'}: {exc}")
        return EXIT_NUMERICAL
    except OSError as exc:
        logger.error(f"I/O error: {exc}")
        return EXIT_IO

    logger.info("Benchmark CLI execution completed successfully")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

# flows/main_pipeline.py
# ---------------------------------------------------------
# Main Prefect flow for a benchmark run.
#
# Logging:
#   Module logger name: flows.main_pipeline
# ---------------------------------------------------------

from pathlib import Path

from prefect import flow

from bench.flow import bench_flow
from bench.spec import ExperimentSpec
from util.logger import get_logger

logger = get_logger("flows.main_pipeline")


@flow(name="RIS Channel Estimation Benchmark")
def main_pipeline_flow(spec: ExperimentSpec) -> Path:
    """Runs the NMSE sweep described by `spec` and writes its outputs."""
    logger.info(f"Benchmark pipeline started: {spec.name} ({spec.sweep_variable.value} sweep)")

    logger.info("▶ Running NMSE sweep")
    csv_path = bench_flow(spec)
    logger.info("✔ NMSE sweep completed successfully")

    logger.info(f"✅ Benchmark pipeline completed → {csv_path}")
    return csv_path

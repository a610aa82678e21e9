# bench/flow.py
# ---------------------------------------------------------
# Prefect orchestration of one benchmark run.
# Includes:
#   ✔ Retry logic on the output write (transient I/O errors only)
#   ✔ [PERF] timing for every step
#   ✔ Re-read validation of the written CSV
# ---------------------------------------------------------

from __future__ import annotations

import time
from pathlib import Path

from prefect import flow, task

from bench.spec import ExperimentSpec, ResultRow
from bench.sweep import run_experiment
from bench.validator import validate_output_csv
from bench.writer import emit_outputs
from util.logger import get_logger

logger = get_logger("bench.flow")

# These fail the same way on every attempt.
PERMANENT_IO_ERRORS = (
    PermissionError,
    NotADirectoryError,
    IsADirectoryError,
    FileExistsError,
    FileNotFoundError,
)


def retry_transient_io(task, task_run, state) -> bool:
    """Prefect retry condition: retry OSErrors except the permanent kinds."""
    try:
        state.result()
    except PERMANENT_IO_ERRORS as exc:
        logger.warning(f"Not retrying {type(exc).__name__}: {exc}")
        return False
    except OSError:
        return True
    except Exception:
        return False
    return False


# ---------------------------------------------------------
# Prefect Tasks
# ---------------------------------------------------------

@task(name="Bench ▸ Run Sweep")
def task_run_sweep(spec: ExperimentSpec) -> list[ResultRow]:
    start = time.time()
    logger.info(f"[Task] Running sweep '{spec.name}'")

    rows = run_experiment(spec)

    duration = time.time() - start
    logger.info(f"[PERF] Run Sweep completed in {duration:.2f} sec (rows={len(rows)})")
    return rows


@task(
    name="Bench ▸ Emit Outputs",
    retries=3,
    retry_delay_seconds=5,
    retry_condition_fn=retry_transient_io,
)
def task_emit_outputs(rows: list[ResultRow], spec: ExperimentSpec) -> dict[str, Path]:
    start = time.time()
    logger.info(f"[Task] Writing outputs under {spec.output_path}")

    outputs = emit_outputs(rows, spec)

    duration = time.time() - start
    logger.info(f"[PERF] Emit Outputs completed in {duration:.2f} sec ({', '.join(outputs)})")
    return outputs


@task(name="Bench ▸ Validate Result CSV")
def task_validate_output(csv_path: Path, expected_rows: int) -> bool:
    start = time.time()
    logger.info(f"[Task] Validating result CSV: {csv_path}")

    ok = validate_output_csv(csv_path, expected_rows)

    duration = time.time() - start
    if not ok:
        raise OSError(f"❌ Result CSV validation failed for {csv_path}")
    logger.info(f"[PERF] CSV validation completed in {duration:.2f} sec")
    return True


# ---------------------------------------------------------
# Prefect Flow
# ---------------------------------------------------------

@flow(name="Bench – NMSE Sweep")
def bench_flow(spec: ExperimentSpec) -> Path:
    logger.info(f"🚀 Starting benchmark '{spec.name}' (seed={spec.scenario.rng_seed})")
    total_start = time.time()

    rows = task_run_sweep(spec)
    outputs = task_emit_outputs(rows, spec)
    task_validate_output(outputs["csv"], len(rows))

    total_duration = time.time() - total_start
    logger.info(f"⏱️ [Bench TOTAL] Completed in {total_duration:.2f} sec")
    logger.info(f"✅ Benchmark completed → Output: {outputs['csv']}")
    return outputs["csv"]

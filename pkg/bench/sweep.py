# bench/sweep.py
# ---------------------------------------------------------
# Monte-Carlo driver.
#
# For sweep value i and trial t the realization comes from
# trial_rng(seed, t, stream=i), so every method sees the same draws
# and the worker count never changes a result. Trials run on a thread
# pool (numpy releases the GIL in the heavy kernels); per-trial
# results are reduced in trial-index order.
# ---------------------------------------------------------

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from bench.spec import METHODS, ExperimentSpec, ResultRow
from bench.trials import METHOD_REGISTRY, Workbench, build_trial, families_for, sweep_point
from util.errors import ConfigError
from util.logger import get_logger

logger = get_logger("bench.sweep")


def _run_trial(bench: Workbench, value: float, stream: int, trial_index: int) -> dict[str, tuple[float, float]]:
    spec = bench.spec
    ctx = build_trial(bench, sweep_point(spec, value), trial_index, stream, families_for(spec.methods))
    out = {}
    for name in spec.methods:
        start = time.perf_counter()
        nmse = METHOD_REGISTRY[name].run(ctx)
        out[name] = (nmse, time.perf_counter() - start)
    return out


def _std_error(samples: np.ndarray) -> float:
    if samples.size < 2:
        return 0.0
    return float(np.std(samples, ddof=1) / math.sqrt(samples.size))


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """One ResultRow per (method, sweep value), methods in spec order within each value."""
    unknown = [m for m in spec.methods if m not in METHOD_REGISTRY or m not in METHODS]
    if unknown:
        raise ConfigError(f"Unknown method(s) {unknown}")

    bench = Workbench.for_spec(spec)
    sweep_name = spec.sweep_variable.value
    rows: list[ResultRow] = []

    logger.info(
        f"Sweep '{spec.name}': {sweep_name} over {list(spec.sweep_values)}, "
        f"methods={list(spec.methods)}, trials={spec.trials}, threads={spec.threads}"
    )

    with ThreadPoolExecutor(max_workers=spec.threads) as pool:
        for stream, value in enumerate(spec.sweep_values):
            start = time.time()
            per_trial = list(
                pool.map(lambda t: _run_trial(bench, value, stream, t), range(spec.trials))
            )

            for name in spec.methods:
                samples = np.array([trial[name][0] for trial in per_trial])
                seconds = math.fsum(trial[name][1] for trial in per_trial)
                rows.append(
                    ResultRow(
                        method=name,
                        sweep_name=sweep_name,
                        sweep_value=float(value),
                        nmse_mean=math.fsum(samples.tolist()) / samples.size,
                        trials=spec.trials,
                        wall_time_seconds=seconds if spec.output.record_wall_time else 0.0,
                        nmse_std_error=_std_error(samples),
                    )
                )
                logger.info(f"{sweep_name}={value}: {name} NMSE={rows[-1].nmse_db:.2f} dB")

            logger.info(f"[PERF] Sweep point {sweep_name}={value} completed in {time.time() - start:.2f} sec")

    return rows

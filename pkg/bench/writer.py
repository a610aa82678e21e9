# bench/writer.py
# ---------------------------------------------------------
# Result table output.
#
# Features:
#   ✓ Fixed CSV schema (CSV_COLUMNS), LF line endings
#   ✓ Floats rendered with 9 significant digits, so reruns are byte-identical
#   ✓ Written to a temp file and renamed; a failed write leaves no partial CSV
#
# Logging: centralized ("bench.writer")
# ---------------------------------------------------------

from __future__ import annotations

import os
from collections.abc import Sequence
from pathlib import Path

import polars as pl

from bench.plot import plot_results
from bench.spec import ExperimentSpec, ResultRow
from util.errors import InvalidArgumentError
from util.logger import get_logger

logger = get_logger("bench.writer")

CSV_COLUMNS = ["method", "sweep_name", "sweep_value", "nmse_linear", "nmse_db", "trials", "wall_time_s"]


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def results_frame(rows: Sequence[ResultRow]) -> pl.DataFrame:
    """Rows as a string-typed frame in CSV_COLUMNS order."""
    return pl.DataFrame(
        {
            "method": [r.method for r in rows],
            "sweep_name": [r.sweep_name for r in rows],
            "sweep_value": [_fmt(r.sweep_value) for r in rows],
            "nmse_linear": [_fmt(r.nmse_mean) for r in rows],
            "nmse_db": [_fmt(r.nmse_db) for r in rows],
            "trials": [str(r.trials) for r in rows],
            "wall_time_s": [_fmt(r.wall_time_seconds) for r in rows],
        },
        schema={c: pl.Utf8 for c in CSV_COLUMNS},
    )


def write_results_csv(rows: Sequence[ResultRow], path: Path | str) -> Path:
    if not rows:
        raise InvalidArgumentError("no result rows to write")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")

    df = results_frame(rows)
    try:
        df.write_csv(tmp, line_terminator="\n")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise

    logger.info(f"Wrote {df.height} result rows → {path}")
    return path


def emit_outputs(rows: Sequence[ResultRow], spec: ExperimentSpec) -> dict[str, Path]:
    """CSV always; the NMSE plot when output.plot is set."""
    outputs = {"csv": write_results_csv(rows, spec.csv_path)}
    if spec.output.plot:
        plot_results(rows, spec, spec.plot_path)
        outputs["plot"] = spec.plot_path
    return outputs

# bench/validator.py
# ---------------------------------------------------------
# Validator for the written result CSV.
# - Re-reads the file as strings (no type inference)
# - Checks header presence and order against CSV_COLUMNS
# - Optionally checks the data row count
# - Returns True when valid, False otherwise; logs what differs
# ---------------------------------------------------------

from __future__ import annotations

from pathlib import Path

import polars as pl

from bench.writer import CSV_COLUMNS
from util.logger import get_logger

logger = get_logger("bench.validator")


def validate_output_csv(path: Path | str, expected_rows: int | None = None) -> bool:
    path = Path(path)
    logger.info(f"[Validator] Validating result CSV: {path}")

    if not path.exists():
        logger.error(f"[Validator] No result CSV at {path}")
        raise FileNotFoundError(f"No result CSV at {path}")

    try:
        df = pl.read_csv(path, infer_schema_length=0)
    except Exception as e:
        logger.error(f"[Validator] Failed to read {path}: {e}")
        raise

    produced = list(df.columns)
    missing = [c for c in CSV_COLUMNS if c not in produced]
    extra = [c for c in produced if c not in CSV_COLUMNS]

    if missing:
        logger.error(f"[Validator] Missing columns: {missing}")
    if extra:
        logger.warning(f"[Validator] Extra columns: {extra}")
    if not missing and not extra and produced != CSV_COLUMNS:
        logger.error(f"[Validator] Column order differs: {produced}")

    valid = produced == CSV_COLUMNS
    if expected_rows is not None and df.height != expected_rows:
        logger.error(f"[Validator] Expected {expected_rows} rows, found {df.height}")
        valid = False

    if valid:
        logger.info(f"[Validator] Result CSV validation PASSED → {df.height} rows")
    else:
        logger.error("[Validator] Result CSV validation FAILED")
    return valid

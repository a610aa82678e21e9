# bench/__init__.py
# Monte-Carlo NMSE harness: metrics, sweep driver and result output.

from .metrics import nmse_cascaded, nmse_h, to_db
from .spec import ExperimentSpec, ResultRow, SweepVariable, build_experiment_spec
from .sweep import run_experiment
from .writer import CSV_COLUMNS, emit_outputs, write_results_csv
from .validator import validate_output_csv
from .plot import plot_results

__all__ = [
    "nmse_cascaded",
    "nmse_h",
    "to_db",
    "ExperimentSpec",
    "ResultRow",
    "SweepVariable",
    "build_experiment_spec",
    "run_experiment",
    "CSV_COLUMNS",
    "emit_outputs",
    "write_results_csv",
    "validate_output_csv",
    "plot_results",
]

# bench/plot.py
# ---------------------------------------------------------
# NMSE (dB) versus the swept variable, one line per method.
# Headless backend; the figure is closed after saving.
# ---------------------------------------------------------

from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from bench.spec import ExperimentSpec, ResultRow, SweepVariable  # noqa: E402
from util.logger import get_logger  # noqa: E402

logger = get_logger("bench.plot")

_MARKERS = ("o", "s", "^", "v", "D", "x", "*", "p", "h")
_XLABEL = {
    SweepVariable.SNR_DB: "SNR (dB)",
    SweepVariable.MEASUREMENTS: "Measurements per RIS",
}


def plot_results(rows: Sequence[ResultRow], spec: ExperimentSpec, path: Path | str) -> int:
    """Save the figure to `path`; returns the number of series drawn."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 5))
    series = 0
    try:
        for i, method in enumerate(dict.fromkeys(r.method for r in rows)):
            points = sorted((r.sweep_value, r.nmse_db) for r in rows if r.method == method)
            xs = [x for x, _ in points]
            ys = [y if math.isfinite(y) else float("nan") for _, y in points]
            ax.plot(xs, ys, marker=_MARKERS[i % len(_MARKERS)], label=method)
            series += 1

        ax.set_xlabel(_XLABEL[spec.sweep_variable])
        ax.set_ylabel("NMSE (dB)")
        ax.set_title(spec.name)
        ax.grid(True, linestyle="--", alpha=0.5)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, dpi=150)
    finally:
        plt.close(fig)

    logger.info(f"Saved plot with {series} series → {path}")
    return series

# estimators/__init__.py
# Channel estimators: LS, greedy CS baselines, 3D-MLAOMP, two-timescale.

from .pursuit import EstimateResult, GreedyConfig, Score, StopRule, noise_floor_tolerance
from .greedy import laomp, omp, somp_mmv
from .cascaded import (
    aoa_stage,
    cascaded_laomp,
    cascaded_omp,
    cascaded_somp,
    estimate_cascaded_3d,
    mlaomp_3d,
)
from .least_squares import ls_cascaded, oracle_ls
from .twotimescale import twotimescale_cooperative, twotimescale_individual, twotimescale_oracle_ls

__all__ = [
    "EstimateResult",
    "GreedyConfig",
    "Score",
    "StopRule",
    "noise_floor_tolerance",
    "laomp",
    "omp",
    "somp_mmv",
    "aoa_stage",
    "cascaded_laomp",
    "cascaded_omp",
    "cascaded_somp",
    "estimate_cascaded_3d",
    "mlaomp_3d",
    "ls_cascaded",
    "oracle_ls",
    "twotimescale_cooperative",
    "twotimescale_individual",
    "twotimescale_oracle_ls",
]

# bench/spec.py
# ---------------------------------------------------------
# Experiment description and result rows.
#
# build_experiment_spec() turns the merged YAML mapping into frozen
# dataclasses; any key that is not a field is a ConfigError.
# ---------------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any

from channel.types import SystemConfig
from estimators.pursuit import Score, StopRule
from measurement.reflection import EntryModel
from util.errors import ConfigError, InvalidArgumentError

CASCADED_METHODS = ("ls", "oracle-ls", "omp", "laomp", "somp", "3d-mlaomp")
TWOTIMESCALE_METHODS = ("tt-oracle-ls", "tt-individual", "tt-cooperative")
METHODS = CASCADED_METHODS + TWOTIMESCALE_METHODS


class SweepVariable(str, Enum):
    SNR_DB = "snr-db"
    MEASUREMENTS = "measurements"


@dataclass(frozen=True)
class MeasurementSettings:
    pilot_length: int | None = None  # T; defaults to K
    reflection_model: EntryModel = EntryModel.UNIT_MODULUS

    def __post_init__(self):
        object.__setattr__(self, "reflection_model", EntryModel(self.reflection_model))


@dataclass(frozen=True)
class EstimationSettings:
    grid_ris: int = 512
    grid_bs: int = 512
    look_ahead_aod: int = 3
    look_ahead_aoa: int = 9
    look_ahead_1d: int = 9
    stop_rule: StopRule = StopRule.FIRST_OF_BOTH
    residual_scale: float = 1.5
    aoa_residual_scale: float = 1.5
    score: Score = Score.L1
    atom_factor_3d: int = 4
    look_ahead_depth_3d: int = 3

    def __post_init__(self):
        object.__setattr__(self, "stop_rule", StopRule(self.stop_rule))
        object.__setattr__(self, "score", Score(self.score))
        for name in (
            "look_ahead_aod",
            "look_ahead_aoa",
            "look_ahead_1d",
            "grid_ris",
            "grid_bs",
            "atom_factor_3d",
            "look_ahead_depth_3d",
        ):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"estimation.{name} must be >= 1")


@dataclass(frozen=True)
class OutputSettings:
    plot: bool = True
    record_wall_time: bool = True


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    scenario: SystemConfig
    sweep_variable: SweepVariable
    sweep_values: tuple[float, ...]
    methods: tuple[str, ...]
    trials: int
    output_path: Path
    on_grid: bool = False
    snr_db: float = 10.0
    measurements: int = 32
    threads: int = 1
    measurement: MeasurementSettings = field(default_factory=MeasurementSettings)
    estimation: EstimationSettings = field(default_factory=EstimationSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def __post_init__(self):
        object.__setattr__(self, "sweep_variable", SweepVariable(self.sweep_variable))
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "output_path", Path(self.output_path))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must not be empty")
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"Unknown method(s) {unknown}; registered: {', '.join(METHODS)}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.sweep_variable is SweepVariable.MEASUREMENTS and any(
            int(v) != v or v < 1 for v in self.sweep_values
        ):
            raise ConfigError(f"measurement sweep needs positive integers, got {self.sweep_values}")

    @property
    def csv_path(self) -> Path:
        return self.output_path / f"{self.name}.csv"

    @property
    def plot_path(self) -> Path:
        return self.output_path / f"{self.name}.png"


@dataclass(frozen=True)
class ResultRow:
    method: str
    sweep_name: str
    sweep_value: float
    nmse_mean: float
    trials: int
    wall_time_seconds: float
    nmse_std_error: float = 0.0

    @property
    def nmse_db(self) -> float:
        return 10 * math.log10(self.nmse_mean) if self.nmse_mean > 0 else -math.inf


# ---------------------------------------------------------
# Mapping -> dataclasses
# ---------------------------------------------------------

_SECTIONS = ("experiment", "scenario", "measurement", "estimation", "output")


def _section(cls, mapping: dict[str, Any] | None, section: str, exclude: tuple[str, ...] = ()):
    mapping = dict(mapping or {})
    allowed = {f.name for f in fields(cls) if f.init} - set(exclude)
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"Unknown key(s) in [{section}]: {unknown}")
    return mapping


def build_experiment_spec(cfg: dict[str, Any]) -> ExperimentSpec:
    unknown_sections = sorted(set(cfg) - set(_SECTIONS))
    if unknown_sections:
        raise ConfigError(f"Unknown config section(s): {unknown_sections}")

    try:
        scenario = SystemConfig(**_section(SystemConfig, cfg.get("scenario"), "scenario"))
        measurement = MeasurementSettings(**_section(MeasurementSettings, cfg.get("measurement"), "measurement"))
        estimation = EstimationSettings(**_section(EstimationSettings, cfg.get("estimation"), "estimation"))
        output = OutputSettings(**_section(OutputSettings, cfg.get("output"), "output"))
        experiment = _section(
            ExperimentSpec,
            cfg.get("experiment"),
            "experiment",
            exclude=("scenario", "measurement", "estimation", "output"),
        )
        return ExperimentSpec(
            scenario=scenario,
            measurement=measurement,
            estimation=estimation,
            output=output,
            **experiment,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid experiment configuration: {exc}") from exc

# measurement/__init__.py
# Pilots, reflection schedules and training observations.

from .pilots import PilotBook, despread, despread_all, effective_noise_power, make_pilots, noise_power_for_snr
from .reflection import EntryModel, ReflectionSchedule, make_schedule, split_training
from .observation import (
    Observation,
    build_observation_tensor,
    build_ts_observations,
    synthesize_subframe,
    synthesize_twotimescale,
)
from .sensing import build_twotimescale_sensing, sensing_matrix

__all__ = [
    "PilotBook",
    "despread",
    "despread_all",
    "effective_noise_power",
    "make_pilots",
    "noise_power_for_snr",
    "EntryModel",
    "ReflectionSchedule",
    "make_schedule",
    "split_training",
    "Observation",
    "build_observation_tensor",
    "build_ts_observations",
    "synthesize_subframe",
    "synthesize_twotimescale",
    "build_twotimescale_sensing",
    "sensing_matrix",
]

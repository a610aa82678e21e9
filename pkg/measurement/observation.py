# measurement/observation.py
# ---------------------------------------------------------
# Uplink training observations.
#
#   Y_{m,q} = sum_k sum_n F_mn^H V_n^q h_nk s_k^H + W_{m,q}       (J_m x T)
#
# Despread per user and stacked over the Q_bar sub-frames of one TS
# block and the K users, each BS gets a J_m x Q_bar x K tensor whose
# noiseless slice [:, :, k] is G_mkn^H V_n.
#
# Noise is drawn per sub-frame, q outer and BS inner, so a given rng
# stream always produces the same observation.
# ---------------------------------------------------------

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from channel.types import ChannelSet, SystemConfig
from measurement.pilots import PilotBook, despread_all
from measurement.reflection import ReflectionSchedule
from tensor.core import ComplexTensor3
from util.errors import InvalidArgumentError
from util.logger import get_logger
from util.seeding import complex_gaussian

logger = get_logger("measurement.observation")


@dataclass(frozen=True, eq=False)
class Observation:
    per_bs_tensors: tuple[ComplexTensor3, ...]
    active_ris: int
    snr_db: float
    schedule: ReflectionSchedule

    @property
    def num_bs(self) -> int:
        return len(self.per_bs_tensors)


def synthesize_subframe(
    channels: ChannelSet,
    bs: int,
    reflections: Sequence[np.ndarray | None],
    pilots: PilotBook,
    noise_power: float,
    rng: np.random.Generator | None,
) -> np.ndarray:
    """
    Received block of BS `bs` in one sub-frame. `reflections[n]` is v_n^q,
    or None for a switched-off RIS.
    """
    config = channels.config
    if len(reflections) != config.num_ris:
        raise InvalidArgumentError(f"need one reflection entry per RIS ({config.num_ris})")
    if pilots.num_users != config.num_users:
        raise InvalidArgumentError(
            f"pilot book serves {pilots.num_users} users, scenario has {config.num_users}"
        )

    J = config.bs_antennas[bs]
    effective = np.zeros((J, config.num_users), dtype=complex)
    for n, v in enumerate(reflections):
        if v is None:
            continue
        F_h = channels.bs_ris[bs][n].entries.conj().T
        H = np.hstack([channels.ris_user[n][k].entries for k in range(config.num_users)])
        effective += F_h @ (v.reshape(-1, 1) * H)

    Y = effective @ pilots.sequences.conj()
    if noise_power > 0:
        if rng is None:
            raise InvalidArgumentError("noisy synthesis needs an rng")
        Y = Y + complex_gaussian(rng, Y.shape, noise_power)
    return Y


def _active_only(num_ris: int, active: int, v: np.ndarray) -> list[np.ndarray | None]:
    reflections: list[np.ndarray | None] = [None] * num_ris
    reflections[active] = v
    return reflections


def build_observation_tensor(
    config: SystemConfig,
    channels: ChannelSet,
    schedule: ReflectionSchedule,
    pilots: PilotBook,
    rng: np.random.Generator | None,
    active_ris: int = 0,
    noise_power: float | None = None,
) -> Observation:
    """J_m x Q_bar x K observation tensors of every BS for one TS block."""
    noise_power = config.noise_power if noise_power is None else noise_power
    if not 0 <= active_ris < schedule.num_ris:
        raise InvalidArgumentError(f"active RIS {active_ris} outside [0, {schedule.num_ris})")

    block = schedule.block(active_ris)
    Q_bar = block.shape[1]
    K = config.num_users
    slices = [np.zeros((J, Q_bar, K), dtype=complex) for J in config.bs_antennas]

    for q in range(Q_bar):
        reflections = _active_only(config.num_ris, active_ris, block[:, q])
        for m in range(config.num_bs):
            Y = synthesize_subframe(channels, m, reflections, pilots, noise_power, rng)
            slices[m][:, q, :] = despread_all(Y, pilots)

    snr_db = float(10 * np.log10(config.pilot_power / noise_power)) if noise_power > 0 else float("inf")
    logger.debug(f"Observation for RIS {active_ris}: {config.num_bs} tensors, Q_bar={Q_bar}, K={K}")
    return Observation(tuple(ComplexTensor3(s) for s in slices), active_ris, snr_db, schedule)


def build_ts_observations(
    config: SystemConfig,
    channels: ChannelSet,
    schedule: ReflectionSchedule,
    pilots: PilotBook,
    rng: np.random.Generator | None,
    noise_power: float | None = None,
) -> list[Observation]:
    """One Observation per RIS, in TS order."""
    return [
        build_observation_tensor(config, channels, schedule, pilots, rng, n, noise_power)
        for n in range(schedule.num_ris)
    ]


def synthesize_twotimescale(
    channels: ChannelSet,
    ris: int,
    reflections: np.ndarray,
    pilots: PilotBook,
    noise_power: float,
    rng: np.random.Generator | None,
) -> list[np.ndarray]:
    """
    Second-timescale training for RIS `ris` over the Q_bar' columns of
    `reflections`. Returns, per BS, a (Q_bar' * J_m) x K matrix whose
    column k is Y~_{m,k} = Phi_m h_k + W~_m (sub-frame blocks stacked).
    """
    config = channels.config
    Q_bar = reflections.shape[1]
    out = [np.zeros((Q_bar * J, config.num_users), dtype=complex) for J in config.bs_antennas]
    for q in range(Q_bar):
        active = _active_only(config.num_ris, ris, reflections[:, q])
        for m, J in enumerate(config.bs_antennas):
            Y = synthesize_subframe(channels, m, active, pilots, noise_power, rng)
            out[m][q * J:(q + 1) * J, :] = despread_all(Y, pilots)
    return out

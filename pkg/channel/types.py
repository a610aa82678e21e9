# channel/types.py
# ---------------------------------------------------------
# Scenario and channel containers.
#
# Everything here is frozen: arrays are stored read-only so a channel
# realization can be shared between estimators and worker threads.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from util.errors import InvalidArgumentError


def _frozen(array, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


class LinkRole(str, Enum):
    BS_RIS = "bs-ris"
    RIS_USER = "ris-user"
    CASCADED = "cascaded"


@dataclass(frozen=True)
class SystemConfig:
    """Scenario description: node counts, array sizes, powers and spacing."""

    num_bs: int = 3
    num_ris: int = 3
    num_users: int = 8
    bs_antennas: tuple[int, ...] | int = 16
    ris_elements: int = 128
    paths_bs_ris: int = 3
    paths_ris_user: int = 3
    pilot_power: float = 1.0
    noise_power: float = 0.1
    element_spacing_ratio: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if isinstance(self.bs_antennas, int):
            object.__setattr__(self, "bs_antennas", (self.bs_antennas,) * self.num_bs)
        else:
            object.__setattr__(self, "bs_antennas", tuple(int(j) for j in self.bs_antennas))

        counts = {
            "num_bs": self.num_bs,
            "num_ris": self.num_ris,
            "num_users": self.num_users,
            "ris_elements": self.ris_elements,
            "paths_bs_ris": self.paths_bs_ris,
            "paths_ris_user": self.paths_ris_user,
        }
        for name, value in counts.items():
            if int(value) < 1:
                raise InvalidArgumentError(f"{name} must be >= 1, got {value}")
        if len(self.bs_antennas) != self.num_bs:
            raise InvalidArgumentError(
                f"bs_antennas lists {len(self.bs_antennas)} entries for {self.num_bs} BSs"
            )
        if min(self.bs_antennas) < 1:
            raise InvalidArgumentError(f"every BS needs >= 1 antenna, got {self.bs_antennas}")
        if self.pilot_power <= 0 or self.noise_power <= 0:
            raise InvalidArgumentError(
                f"powers must be positive (pilot={self.pilot_power}, noise={self.noise_power})"
            )
        if not 0 < self.element_spacing_ratio <= 1:
            raise InvalidArgumentError(
                f"element_spacing_ratio must lie in (0, 1], got {self.element_spacing_ratio}"
            )

    @property
    def snr_db(self) -> float:
        return float(10 * np.log10(self.pilot_power / self.noise_power))


@dataclass(frozen=True)
class PathSet:
    """
    Multipath parameters of one physical link.

    Angles are kept as steering-vector phase arguments (2*pi*d/lambda)*sin(angle)
    wrapped to [-pi, pi). For BS-RIS links `aoa_arguments` live on the RIS and
    `aod_arguments` on the BS; for RIS-user links `aod_arguments` live on the RIS
    and `aoa_arguments` belong to the single-antenna user.
    """

    aoa_arguments: np.ndarray
    aod_arguments: np.ndarray
    gains: np.ndarray
    num_paths: int = field(init=False)

    def __post_init__(self):
        aoa = _frozen(np.atleast_1d(self.aoa_arguments), float)
        aod = _frozen(np.atleast_1d(self.aod_arguments), float)
        gains = _frozen(np.atleast_1d(self.gains), complex)
        if not (aoa.ndim == aod.ndim == gains.ndim == 1):
            raise InvalidArgumentError("path parameters must be one-dimensional")
        if not (aoa.size == aod.size == gains.size):
            raise InvalidArgumentError(
                f"path lists disagree: aoa={aoa.size}, aod={aod.size}, gains={gains.size}"
            )
        if gains.size < 1:
            raise InvalidArgumentError("a PathSet needs at least one path")
        object.__setattr__(self, "aoa_arguments", aoa)
        object.__setattr__(self, "aod_arguments", aod)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "num_paths", int(gains.size))


_EXPECTED_COLUMNS = {LinkRole.RIS_USER: 1}


@dataclass(frozen=True)
class ChannelMatrix:
    """A channel with its role: bs-ris (L x J), ris-user (L x 1) or cascaded (L x J)."""

    entries: np.ndarray
    link_role: LinkRole

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim == 1:
            entries = entries[:, None]
        if entries.ndim != 2:
            raise InvalidArgumentError(f"channel entries must be a matrix, got ndim={entries.ndim}")
        role = LinkRole(self.link_role)
        cols = _EXPECTED_COLUMNS.get(role)
        if cols is not None and entries.shape[1] != cols:
            raise InvalidArgumentError(
                f"{role.value} channel must have {cols} column, got shape {entries.shape}"
            )
        object.__setattr__(self, "entries", _frozen(entries, complex))
        object.__setattr__(self, "link_role", role)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def num_rows(self) -> int:
        return self.entries.shape[0]

    def frobenius_norm_sq(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)


@dataclass(frozen=True)
class ChannelSet:
    """All physical channels of one realization, indexed [m][n] and [n][k]."""

    config: SystemConfig
    bs_ris: tuple[tuple[ChannelMatrix, ...], ...]
    ris_user: tuple[tuple[ChannelMatrix, ...], ...]
    bs_ris_paths: tuple[tuple[PathSet, ...], ...]
    ris_user_paths: tuple[tuple[PathSet, ...], ...]

    def cascaded(self, m: int, n: int, k: int) -> ChannelMatrix:
        from channel.geometry import cascaded_channel

        return cascaded_channel(self.ris_user[n][k], self.bs_ris[m][n])

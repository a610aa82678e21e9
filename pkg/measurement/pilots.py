# measurement/pilots.py
# ---------------------------------------------------------
# Orthogonal uplink pilots and despreading.
#
#   s_k^H s_j = 0 (k != j),  s_k^H s_k = sigma_p^2 T
#
# Rows of `sequences` are the s_k (scaled DFT rows). The received block
# is Y = sum_k e_k s_k^H, so Y s_k / (sigma_p^2 T) isolates e_k.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from util.errors import InvalidArgumentError


@dataclass(frozen=True)
class PilotBook:
    sequences: np.ndarray
    power: float

    def __post_init__(self):
        seq = np.array(self.sequences, dtype=complex)
        if seq.ndim != 2:
            raise InvalidArgumentError(f"pilot sequences must be K x T, got shape {seq.shape}")
        if seq.shape[1] < seq.shape[0]:
            raise InvalidArgumentError(f"need T >= K, got K={seq.shape[0]}, T={seq.shape[1]}")
        seq.flags.writeable = False
        object.__setattr__(self, "sequences", seq)

    @property
    def num_users(self) -> int:
        return self.sequences.shape[0]

    @property
    def symbol_count(self) -> int:
        return self.sequences.shape[1]

    @property
    def energy(self) -> float:
        """sigma_p^2 T, the per-user pilot energy."""
        return self.power * self.symbol_count


def make_pilots(K: int, T: int, power: float) -> PilotBook:
    if K < 1 or T < K:
        raise InvalidArgumentError(f"orthogonal pilots need 1 <= K <= T, got K={K}, T={T}")
    if power <= 0:
        raise InvalidArgumentError(f"pilot power must be positive, got {power}")
    k = np.arange(K)[:, None]
    t = np.arange(T)[None, :]
    return PilotBook(np.sqrt(power) * np.exp(-2j * np.pi * k * t / T), power)


def despread(Y_mq: np.ndarray, pilots: PilotBook, k: int) -> np.ndarray:
    """(1 / sigma_p^2 T) * Y s_k for one user."""
    if not 0 <= k < pilots.num_users:
        raise InvalidArgumentError(f"user {k} outside [0, {pilots.num_users})")
    return (Y_mq @ pilots.sequences[k]) / pilots.energy


def despread_all(Y_mq: np.ndarray, pilots: PilotBook) -> np.ndarray:
    """Column k is the despread vector of user k."""
    return (Y_mq @ pilots.sequences.T) / pilots.energy


def noise_power_for_snr(pilot_power: float, snr_db: float) -> float:
    """SNR = sigma_p^2 / sigma_n^2."""
    return pilot_power / 10 ** (snr_db / 10)


def effective_noise_power(noise_power: float, pilots: PilotBook) -> float:
    """Per-entry noise variance after despreading: sigma_n^2 / (sigma_p^2 T)."""
    return noise_power / pilots.energy

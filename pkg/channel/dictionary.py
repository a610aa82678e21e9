# channel/dictionary.py
# ---------------------------------------------------------
# Over-complete DFT steering dictionaries and virtual-channel
# reconstruction.
#
# Grid convention: argument g is -pi + 2*pi*g/G, i.e. the normalized
# [-1, 1) grid multiplied by pi, so atom g = a(-pi + 2*pi*g/G).
#
# The sparse virtual matrix X is never materialized; a cascaded channel
# is carried as supports + coefficients:
#   aod_support : AoD grid indices (one slot r per recovered AoD)
#   aoa_support : flat pair indices c = i * P_AoD + r (AoA grid index i,
#                 AoD slot r), the column order of (B kron I_P_AoD)
#   gains       : same flat indices, coefficient = path gain x_(i, r)
# and G = sum_c x_c a_R(i_c) a_T(aod[r_c])^H.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from channel.geometry import steering_matrix, wrap_phase
from channel.types import ChannelMatrix, LinkRole
from util.errors import InvalidArgumentError


@dataclass(frozen=True)
class Dictionary:
    atoms: np.ndarray
    grid_args: np.ndarray
    grid_size: int = field(init=False)

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=complex)
        grid_args = np.array(self.grid_args, dtype=float)
        if atoms.ndim != 2 or atoms.shape[1] != grid_args.size:
            raise InvalidArgumentError(
                f"atoms {atoms.shape} do not match {grid_args.size} grid arguments"
            )
        atoms.flags.writeable = False
        grid_args.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "grid_args", grid_args)
        object.__setattr__(self, "grid_size", int(grid_args.size))

    @property
    def n_elements(self) -> int:
        return self.atoms.shape[0]

    @property
    def step(self) -> float:
        return 2 * np.pi / self.grid_size

    def nearest_indices(self, args) -> np.ndarray:
        """Circularly nearest grid index for each phase argument."""
        offsets = (wrap_phase(np.atleast_1d(args)) + np.pi) / self.step
        return np.mod(np.rint(offsets).astype(int), self.grid_size)

    def columns(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.grid_size):
            raise InvalidArgumentError(
                f"atom index out of range [0, {self.grid_size}): {idx.tolist()}"
            )
        return self.atoms[:, idx]


def build_dictionary(n_elements: int, grid_size: int) -> Dictionary:
    """G uniformly spaced unit-norm atoms over [-pi, pi)."""
    if grid_size < 1 or n_elements < 1:
        raise InvalidArgumentError(
            f"need n_elements >= 1 and grid_size >= 1, got ({n_elements}, {grid_size})"
        )
    if grid_size < n_elements:
        raise InvalidArgumentError(
            f"grid_size {grid_size} is smaller than the array size {n_elements}"
        )
    grid_args = -np.pi + (2 * np.pi / grid_size) * np.arange(grid_size)
    return Dictionary(steering_matrix(grid_args, n_elements), grid_args)


@dataclass(frozen=True)
class SupportSet:
    """Ordered atom indices with aligned coefficients (vector or one row per index)."""

    indices: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        indices = np.array(self.indices, dtype=int).reshape(-1)
        coefficients = np.array(self.coefficients, dtype=complex)
        if coefficients.ndim == 0:
            coefficients = coefficients.reshape(1)
        if coefficients.shape[0] != indices.size:
            raise InvalidArgumentError(
                f"{indices.size} indices but {coefficients.shape[0]} coefficient rows"
            )
        if np.unique(indices).size != indices.size:
            raise InvalidArgumentError(f"support indices must be unique: {indices.tolist()}")
        indices.flags.writeable = False
        coefficients.flags.writeable = False
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "coefficients", coefficients)

    def __len__(self) -> int:
        return int(self.indices.size)

    @classmethod
    def empty(cls) -> SupportSet:
        return cls(np.zeros(0, dtype=int), np.zeros(0, dtype=complex))


def split_pair_indices(flat_indices, num_aod: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat pair index c = i * P_AoD + r  ->  (AoA grid index i, AoD slot r)."""
    flat = np.asarray(flat_indices, dtype=int)
    if num_aod < 1:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    return flat // num_aod, flat % num_aod


def reconstruct_cascaded(
    aod_support: SupportSet,
    aoa_support: SupportSet,
    gains: SupportSet,
    dict_R: Dictionary,
    dict_T: Dictionary,
) -> ChannelMatrix:
    """G = A_R[:, aoa] diag(gains) A_T[:, aod of each entry]^H."""
    L, J = dict_R.n_elements, dict_T.n_elements
    if len(aoa_support) == 0 or len(aod_support) == 0:
        return ChannelMatrix(np.zeros((L, J), dtype=complex), LinkRole.CASCADED)
    if not np.array_equal(aoa_support.indices, gains.indices):
        raise InvalidArgumentError("AoA and gain supports must list the same entries")

    aoa_idx, slots = split_pair_indices(aoa_support.indices, len(aod_support))
    if aoa_idx.max() >= dict_R.grid_size:
        raise InvalidArgumentError(
            f"AoA index {int(aoa_idx.max())} outside grid of size {dict_R.grid_size}"
        )
    a_ris = dict_R.columns(aoa_idx)
    a_bs = dict_T.columns(aod_support.indices[slots])
    entries = (a_ris * gains.coefficients.reshape(-1)) @ a_bs.conj().T
    return ChannelMatrix(entries, LinkRole.CASCADED)


def pairs_to_supports(pairs, coefficients) -> tuple[SupportSet, SupportSet, SupportSet]:
    """Explicit (AoA, AoD) pairs -> (aod_support, aoa_support, gains) in the flat-index layout."""
    aods: list[int] = []
    for _, aod in pairs:
        if aod not in aods:
            aods.append(aod)
    num_aod = len(aods)
    flat = [aoa * num_aod + aods.index(aod) for aoa, aod in pairs]
    coefficients = np.asarray(coefficients, dtype=complex).reshape(-1)
    aod_support = SupportSet(aods, np.zeros(num_aod, dtype=complex))
    return aod_support, SupportSet(flat, coefficients), SupportSet(flat, coefficients)

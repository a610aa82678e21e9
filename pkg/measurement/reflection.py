# measurement/reflection.py
# ---------------------------------------------------------
# RIS reflection schedules under time switching (TS).
#
# Each RIS owns its own block of sub-frames; in the stacked
# N_R*L x Q reflection matrix the other RISs are switched off, so
# V_i V_j^H = O for i != j by construction.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from util.errors import InvalidArgumentError
from util.logger import get_logger
from util.seeding import complex_gaussian

logger = get_logger("measurement.reflection")

_UNIT_MODULUS_TOL = 1e-9


class EntryModel(str, Enum):
    UNIT_MODULUS = "unit-modulus"
    COMPLEX_GAUSSIAN = "complex-gaussian"


@dataclass(frozen=True)
class ReflectionSchedule:
    """One L x Q_n reflection block per RIS; column q is v^q."""

    blocks: tuple[np.ndarray, ...]
    entry_model: EntryModel = EntryModel.UNIT_MODULUS
    mode: str = "time-switching"

    def __post_init__(self):
        if self.mode != "time-switching":
            raise InvalidArgumentError(f"only time-switching schedules are supported, got {self.mode!r}")
        model = EntryModel(self.entry_model)
        blocks = []
        for n, block in enumerate(self.blocks):
            block = np.array(block, dtype=complex)
            if block.ndim != 2:
                raise InvalidArgumentError(f"RIS {n} block must be L x Q, got shape {block.shape}")
            if model is EntryModel.UNIT_MODULUS and block.size and not np.allclose(
                np.abs(block), 1.0, atol=_UNIT_MODULUS_TOL
            ):
                raise InvalidArgumentError(f"RIS {n} block has non-unit-modulus entries")
            block.flags.writeable = False
            blocks.append(block)
        if not blocks:
            raise InvalidArgumentError("a schedule needs at least one RIS block")
        if len({b.shape[0] for b in blocks}) != 1:
            raise InvalidArgumentError("every RIS must have the same number of elements")
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "entry_model", model)

    @property
    def num_ris(self) -> int:
        return len(self.blocks)

    @property
    def ris_elements(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def total_subframes(self) -> int:
        return sum(b.shape[1] for b in self.blocks)

    def block(self, n: int) -> np.ndarray:
        return self.blocks[n]

    def block_columns(self, n: int) -> slice:
        """Sub-frame range of RIS n inside the full Q-column schedule."""
        start = sum(b.shape[1] for b in self.blocks[:n])
        return slice(start, start + self.blocks[n].shape[1])

    def stacked(self) -> np.ndarray:
        """Full N_R*L x Q reflection matrix, zero outside each RIS's active block."""
        L = self.ris_elements
        out = np.zeros((self.num_ris * L, self.total_subframes), dtype=complex)
        for n, block in enumerate(self.blocks):
            out[n * L:(n + 1) * L, self.block_columns(n)] = block
        return out


def draw_reflections(L: int, Q: int, entry_model: EntryModel | str, rng: np.random.Generator) -> np.ndarray:
    model = EntryModel(entry_model)
    if model is EntryModel.UNIT_MODULUS:
        return np.exp(1j * rng.uniform(0.0, 2 * np.pi, (L, Q)))
    return complex_gaussian(rng, (L, Q))


def make_schedule(
    L: int,
    num_ris: int,
    subframes_per_ris: int,
    entry_model: EntryModel | str,
    rng: np.random.Generator,
) -> ReflectionSchedule:
    if L < 1 or num_ris < 1 or subframes_per_ris < 1:
        raise InvalidArgumentError(
            f"schedule needs positive sizes, got L={L}, N_R={num_ris}, Q_bar={subframes_per_ris}"
        )
    blocks = tuple(draw_reflections(L, subframes_per_ris, entry_model, rng) for _ in range(num_ris))
    logger.debug(f"Drew {num_ris} reflection blocks of {L} x {subframes_per_ris} ({EntryModel(entry_model).value})")
    return ReflectionSchedule(blocks, EntryModel(entry_model))


def split_training(total_subframes: int, num_ris: int) -> int:
    """Equal TS split: Q_bar = Q / N_R."""
    if num_ris < 1 or total_subframes < num_ris or total_subframes % num_ris:
        raise InvalidArgumentError(
            f"{total_subframes} sub-frames cannot be split equally over {num_ris} RISs"
        )
    return total_subframes // num_ris

# util/seeding.py
# ---------------------------------------------------------
# Per-trial random streams.
#
# Seeds are derived with a splitmix64 mix of (master seed, trial index,
# stream tag), so a trial's draws never depend on which worker runs it or
# in what order. Generators are PCG64.
# ---------------------------------------------------------

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One splitmix64 step on a 64-bit integer."""
    z = (value + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, trial_index: int, stream: int = 0) -> int:
    """Seed for one trial; `stream` separates sweep points sharing a trial index."""
    mixed = splitmix64(master_seed & _MASK64)
    mixed = splitmix64(mixed ^ (stream & _MASK64))
    return splitmix64(mixed ^ (trial_index & _MASK64))


def trial_rng(master_seed: int, trial_index: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, trial_index, stream)))


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) samples."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

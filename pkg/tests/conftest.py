# tests/conftest.py
# Shared fixtures: seeded generators, a small scenario and an on-grid
# cascaded instance whose sensing atoms are mutually orthogonal.

import numpy as np
import pytest

from channel.dictionary import build_dictionary
from channel.types import SystemConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_config():
    return SystemConfig(
        num_bs=2,
        num_ris=2,
        num_users=3,
        bs_antennas=4,
        ris_elements=8,
        paths_bs_ris=2,
        paths_ris_user=2,
        pilot_power=1.0,
        noise_power=0.1,
    )


def dft_reflections(L: int) -> np.ndarray:
    """L x L unit-modulus block with V V^H = L I."""
    idx = np.arange(L)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / L)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def orthogonal_instance(rng):
    """
    L = J = 8, complete DFT grids, DFT reflections: every dictionary the
    solvers build is orthogonal, so noiseless recovery is exact.

    User 0 has pairs on AoDs {2, 6}; user 1 only on AoD 2.
    """
    L = J = 8
    dict_R = build_dictionary(L, L)
    dict_T = build_dictionary(J, J)
    V = dft_reflections(L)
    pairs = [
        [(1, 2), (5, 2), (3, 6)],
        [(0, 2), (4, 2)],
    ]
    gains = [random_complex(rng, len(p)) for p in pairs]

    channels = []
    for user_pairs, user_gains in zip(pairs, gains):
        G = np.zeros((L, J), dtype=complex)
        for (i, j), x in zip(user_pairs, user_gains):
            G += x * np.outer(dict_R.atoms[:, i], dict_T.atoms[:, j].conj())
        channels.append(G)

    Y = np.stack([G.conj().T @ V for G in channels], axis=2)
    return {
        "dict_R": dict_R,
        "dict_T": dict_T,
        "V": V,
        "pairs": pairs,
        "gains": gains,
        "channels": channels,
        "Y": Y,
    }

# measurement/sensing.py
# ---------------------------------------------------------
# Second-timescale sensing matrices (F_mn known from the first timescale).
#
#   Phi_m     = [F_m^H V^1; ...; F_m^H V^Q']            (Q' J_m x L)
#   Phi_tilde = [Phi_1 A_R; ...; Phi_NB A_R]             (Q' sum(J_m) x G_r)
# ---------------------------------------------------------

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from channel.dictionary import Dictionary
from channel.types import ChannelMatrix
from util.errors import InvalidArgumentError


def sensing_matrix(F: ChannelMatrix, reflections: np.ndarray) -> np.ndarray:
    """Phi_m for one BS: sub-frame q contributes the row block F^H diag(v^q)."""
    F_h = F.entries.conj().T
    if reflections.shape[0] != F.num_rows:
        raise InvalidArgumentError(
            f"reflections have {reflections.shape[0]} rows, RIS has {F.num_rows} elements"
        )
    return np.vstack([F_h * reflections[:, q][None, :] for q in range(reflections.shape[1])])


def build_twotimescale_sensing(
    F_list: Sequence[ChannelMatrix],
    reflections: np.ndarray,
    dict_R: Dictionary,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-BS Phi_m and the cooperative stack of Phi_m A_R."""
    phis = [sensing_matrix(F, reflections) for F in F_list]
    stacked = np.vstack([phi @ dict_R.atoms for phi in phis])
    return phis, stacked

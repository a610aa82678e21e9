# estimators/twotimescale.py
# ---------------------------------------------------------
# Second-timescale RIS-user channel estimation with F_mn known.
#
#   individual  : each BS solves y_mk = (Phi_m A_R) x_k + w on its own
#   cooperative : all BSs stack their measurements against Phi_tilde
#   oracle      : LS on the exact steering vectors of the true paths
# The pursuits reconstruct h_k = A_R x_k. The RIS-user channel is common
# to every BS, so cooperation only adds measurements.
# ---------------------------------------------------------

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from channel.dictionary import Dictionary, SupportSet
from channel.geometry import steering_matrix
from channel.types import ChannelMatrix, LinkRole
from estimators.greedy import laomp
from estimators.pursuit import EstimateResult, GreedyConfig, solve_lstsq


def _with_channel(result: EstimateResult, dict_R: Dictionary) -> EstimateResult:
    h_hat = ChannelMatrix(dict_R.atoms @ result.estimated_channel, LinkRole.RIS_USER)
    return EstimateResult(
        estimated_channel=h_hat,
        support=result.support,
        residual_history=result.residual_history,
        iterations=result.iterations,
        converged=result.converged,
        aoa_support=result.support,
    )


def twotimescale_individual(
    y_mk: np.ndarray, phi_m: np.ndarray, dict_R: Dictionary, cfg: GreedyConfig
) -> EstimateResult:
    return _with_channel(laomp(y_mk, phi_m @ dict_R.atoms, cfg), dict_R)


def twotimescale_cooperative(
    y_k_stacked: np.ndarray, phi_tilde: np.ndarray, dict_R: Dictionary, cfg: GreedyConfig
) -> EstimateResult:
    return _with_channel(laomp(y_k_stacked, phi_tilde, cfg), dict_R)


def twotimescale_oracle_ls(
    y_k_stacked: np.ndarray, phi_stacked: np.ndarray, true_args: Sequence[float]
) -> EstimateResult:
    """
    LS on the exact RIS-side steering vectors of h_k. `phi_stacked` is the
    per-BS Phi_m stacked over the cooperating BSs (rows x L).
    """
    phi_stacked = np.asarray(phi_stacked, dtype=complex)
    args = np.atleast_1d(np.asarray(true_args, dtype=float))
    L = phi_stacked.shape[1]
    if args.size == 0:
        return EstimateResult(ChannelMatrix(np.zeros(L), LinkRole.RIS_USER), SupportSet.empty())

    a_ris = steering_matrix(args, L)
    coef = solve_lstsq(phi_stacked @ a_ris, np.asarray(y_k_stacked, dtype=complex), block="oracle AoA support")
    support = SupportSet(np.arange(args.size), coef)
    h_hat = ChannelMatrix(a_ris @ coef, LinkRole.RIS_USER)
    return EstimateResult(h_hat, support, iterations=1)

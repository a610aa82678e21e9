# estimators/least_squares.py
# ---------------------------------------------------------
# Least-squares cascaded estimators.
#
# ls_cascaded : G_n from Y_bar_n = G_n^H V_n, one solve per TS block
#               (the stacked Gram matrix is block diagonal under TS).
#               Needs Q_bar >= L with full-rank V_n.
# oracle_ls   : gains fitted on the exact steering vectors of the true
#               paths; the lower bound of every estimator.
# ---------------------------------------------------------

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from channel.dictionary import SupportSet
from channel.geometry import steering_matrix
from channel.types import ChannelMatrix, LinkRole
from estimators.pursuit import EstimateResult, solve_lstsq
from measurement.reflection import ReflectionSchedule
from util.errors import InvalidArgumentError, SingularSystemError
from util.logger import get_logger

logger = get_logger("estimators.least_squares")


def ls_cascaded(Y_bar: np.ndarray, schedule: ReflectionSchedule) -> list[ChannelMatrix]:
    """
    Y_bar is J x Q with the TS blocks side by side in schedule order.
    Returns one L x J cascaded estimate per RIS.
    """
    Y_bar = np.asarray(Y_bar, dtype=complex)
    if Y_bar.shape[1] != schedule.total_subframes:
        raise InvalidArgumentError(
            f"observation has {Y_bar.shape[1]} sub-frames, schedule has {schedule.total_subframes}"
        )
    L = schedule.ris_elements
    estimates = []
    for n in range(schedule.num_ris):
        V_n = schedule.block(n)
        block = f"RIS {n} reflection block"
        if V_n.shape[1] < L:
            raise SingularSystemError(
                f"{block} has {V_n.shape[1]} sub-frames for {L} elements (needs Q_bar >= L)",
                block=block,
            )
        Y_n = Y_bar[:, schedule.block_columns(n)]
        # G_n^H V_n = Y_n  <=>  V_n^H G_n = Y_n^H
        G_n = solve_lstsq(V_n.conj().T, Y_n.conj().T, block=block)
        estimates.append(ChannelMatrix(G_n, LinkRole.CASCADED))
    logger.debug(f"LS solved {schedule.num_ris} TS blocks of {L} elements")
    return estimates


def oracle_ls(
    Y_k: np.ndarray,
    ris_args: Sequence[float],
    bs_args: Sequence[float],
    reflections: np.ndarray,
) -> EstimateResult:
    """
    Gains on the exact path arguments, then reconstruction. Pair p is the
    steering pair a_L(ris_args[p]), a_J(bs_args[p]); no grid is involved,
    so the only error left is the noise.
    """
    Y_k = np.asarray(Y_k, dtype=complex)
    ris_args = np.atleast_1d(np.asarray(ris_args, dtype=float))
    bs_args = np.atleast_1d(np.asarray(bs_args, dtype=float))
    if ris_args.size != bs_args.size:
        raise InvalidArgumentError(f"{ris_args.size} RIS arguments but {bs_args.size} BS arguments")
    L, J = reflections.shape[0], Y_k.shape[0]
    if ris_args.size == 0:
        return EstimateResult(ChannelMatrix(np.zeros((L, J)), LinkRole.CASCADED), SupportSet.empty())

    a_ris = steering_matrix(ris_args, L)
    a_bs = steering_matrix(bs_args, J)
    sensing = reflections.T @ a_ris.conj()
    # vec(a_J(phi) a_L^H V) = (V^T a_L^*) kron a_J(phi); its coefficient is conj(gain)
    columns = np.stack([np.kron(sensing[:, p], a_bs[:, p]) for p in range(ris_args.size)], axis=1)
    y = Y_k.reshape(-1, order="F")
    coef = solve_lstsq(columns, y, block="oracle support")
    gains = np.conj(coef)

    G_hat = ChannelMatrix((a_ris * gains) @ a_bs.conj().T, LinkRole.CASCADED)
    residual = y - columns @ coef
    return EstimateResult(
        estimated_channel=G_hat,
        support=SupportSet(np.arange(ris_args.size), gains),
        residual_history=(float(np.vdot(y, y).real), float(np.vdot(residual, residual).real)),
        iterations=1,
    )

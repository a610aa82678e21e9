# estimators/cascaded.py
# ---------------------------------------------------------
# Cascaded BS-RIS-user channel estimation (one BS, one active RIS).
#
# Per user k the despread TS observation is
#   Y_k = G_k^H V = A_T X_k^H A_R^H V        (J x Q_bar)
#
# 3D-MLAOMP:
#   1. AoD stage: all users share the AoDs, so the J x Q_bar x K tensor is
#      solved jointly along mode 1 against A_T (look-ahead pursuit, l1 score).
#   2. AoA stage: per user, vec(Z_k) = (V^T A_R^* kron I_P) vec(X_k^H restricted)
#      is a 1-D problem solved with LAOMP. Its tolerance can follow the
#      noise that the AoD fit passes into each kept row of Z_k.
#   3. Reconstruct G_k from the supports.
#
# Baselines on the same observation:
#   cascaded_omp / cascaded_laomp : vec(Y_k) over V^T A_R^* kron A_T
#   cascaded_somp                 : Y_k^H = (V^H A_R)(X_k A_T^H), row-group sparse
#
# Recovered Kronecker coefficients are conj(gain): the gains are conjugated
# back before reconstruction.
# Module logger: estimators.cascaded
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import replace

import numpy as np

from channel.dictionary import (
    Dictionary,
    SupportSet,
    pairs_to_supports,
    reconstruct_cascaded,
    split_pair_indices,
)
from channel.types import ChannelMatrix, LinkRole
from estimators.greedy import somp_mmv
from estimators.pursuit import (
    EstimateResult,
    GreedyConfig,
    KroneckerOperator,
    MatrixModel,
    TensorModel,
    noise_floor_tolerance,
    pursue,
    solve_lstsq,
)
from tensor.core import ComplexTensor3
from util.errors import InvalidArgumentError
from util.logger import get_logger

logger = get_logger("estimators.cascaded")


def aoa_sensing(reflections: np.ndarray, dict_R: Dictionary) -> np.ndarray:
    """V^T A_R^* (Q_bar x G_r)."""
    if reflections.shape[0] != dict_R.n_elements:
        raise InvalidArgumentError(
            f"reflections have {reflections.shape[0]} rows, dictionary has {dict_R.n_elements}"
        )
    return reflections.T @ dict_R.atoms.conj()


def mlaomp_3d(Y: ComplexTensor3, dict_T: Dictionary, cfg: GreedyConfig) -> tuple[SupportSet, ComplexTensor3]:
    """
    Common AoD support of all users and the coefficient tensor restricted to
    it (P_AoD x Q_bar x K). The support's coefficients are the mode-1
    unfolding rows of that tensor.
    """
    trace = pursue(TensorModel(Y, dict_T.atoms, cfg.score), cfg)
    _, d2, d3 = Y.dims
    if not trace.support:
        return SupportSet.empty(), ComplexTensor3.zeros((0, d2, d3))
    Z = trace.coefficients
    logger.debug(
        f"AoD stage: {len(trace.support)} atoms {trace.support}, residual={trace.residual_history[-1]:.3e}"
    )
    return SupportSet(trace.support, Z.unfold()), Z


def remove_zero_rows(Z_k: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Drop all-zero rows of one user's coefficient slice; returns (rows kept, slice)."""
    keep = np.flatnonzero(np.abs(Z_k).max(axis=1, initial=0.0) > tol)
    return keep, Z_k[keep]


def aoa_stage(
    Z_hat: np.ndarray, reflections: np.ndarray, dict_R: Dictionary, cfg: GreedyConfig
) -> tuple[SupportSet, SupportSet]:
    """
    AoA and gain recovery for one user from its P_AoD x Q_bar coefficient
    matrix. Both returned sets are indexed by the flat pair index
    c = i * P_AoD + r; coefficients are the path gains.
    """
    Z_hat = np.asarray(Z_hat, dtype=complex)
    num_aod = Z_hat.shape[0]
    if num_aod == 0 or not np.any(Z_hat):
        return SupportSet.empty(), SupportSet.empty()

    operator = KroneckerOperator(aoa_sensing(reflections, dict_R), np.eye(num_aod))
    z = Z_hat.reshape(-1, order="F")
    trace = pursue(MatrixModel(z, operator, cfg.score), cfg)
    if not trace.support:
        return SupportSet.empty(), SupportSet.empty()
    gains = np.conj(trace.coefficients[:, 0])
    return SupportSet(trace.support, gains), SupportSet(trace.support, gains)


def aod_noise_gains(dict_T: Dictionary, aod_indices) -> np.ndarray:
    """
    Noise gain of each AoD slot of the LS fit, diag((A_S^H A_S)^-1): white
    observation noise of power s reaches row r of Z with power s * gain[r].
    """
    A_S = dict_T.columns(aod_indices)
    pinv = solve_lstsq(A_S, np.eye(A_S.shape[0]), block="AoD support")
    return (np.abs(pinv) ** 2).sum(axis=1)


def estimate_cascaded_3d(
    Y: ComplexTensor3,
    reflections: np.ndarray,
    dict_R: Dictionary,
    dict_T: Dictionary,
    cfg_aod: GreedyConfig,
    cfg_aoa: GreedyConfig,
    noise_power: float | None = None,
    aoa_scale: float = 1.5,
) -> list[EstimateResult]:
    """
    Full two-stage estimate; one result per user.

    With `noise_power` (per observed entry) the AoA-stage tolerance of each
    user follows the noise that reaches its kept rows of Z:
    aoa_scale * noise_power * Q_bar * sum(gain[kept rows]). Otherwise
    cfg_aoa.residual_tol is used as given.
    """
    aod_support, Z = mlaomp_3d(Y, dict_T, cfg_aod)
    gains_per_slot = (
        aod_noise_gains(dict_T, aod_support.indices) if noise_power is not None and len(aod_support) else None
    )
    results = []
    for k in range(Y.dims[2]):
        Z_k = Z.data[:, :, k]
        keep, Z_hat = remove_zero_rows(Z_k)
        user_aod = SupportSet(aod_support.indices[keep], aod_support.coefficients[keep]) if len(aod_support) else aod_support
        cfg_k = cfg_aoa
        if gains_per_slot is not None and keep.size:
            tol = noise_floor_tolerance(noise_power, Z_hat.shape[1], aoa_scale) * float(gains_per_slot[keep].sum())
            cfg_k = replace(cfg_aoa, residual_tol=tol)
        aoa_support, gains = aoa_stage(Z_hat, reflections, dict_R, cfg_k)
        G_hat = reconstruct_cascaded(user_aod, aoa_support, gains, dict_R, dict_T)
        results.append(
            EstimateResult(
                estimated_channel=G_hat,
                support=gains,
                iterations=len(aoa_support),
                aod_support=user_aod,
                aoa_support=aoa_support,
            )
        )
    return results


def _kronecker_pursuit(
    Y_k: np.ndarray, reflections: np.ndarray, dict_R: Dictionary, dict_T: Dictionary, cfg: GreedyConfig
) -> EstimateResult:
    operator = KroneckerOperator(aoa_sensing(reflections, dict_R), dict_T.atoms)
    y = np.asarray(Y_k, dtype=complex).reshape(-1, order="F")
    trace = pursue(MatrixModel(y, operator, cfg.score), cfg)
    if not trace.support:
        zero = ChannelMatrix(np.zeros((dict_R.n_elements, dict_T.n_elements)), LinkRole.CASCADED)
        return EstimateResult(zero, SupportSet.empty(), tuple(trace.residual_history), 0, trace.converged)

    aoa_idx, aod_idx = split_pair_indices(trace.support, dict_T.grid_size)
    gains = np.conj(trace.coefficients[:, 0])
    pairs = list(zip(aoa_idx.tolist(), aod_idx.tolist()))
    aod_support, aoa_support, gain_set = pairs_to_supports(pairs, gains)
    G_hat = reconstruct_cascaded(aod_support, aoa_support, gain_set, dict_R, dict_T)
    return EstimateResult(
        estimated_channel=G_hat,
        support=SupportSet(trace.support, gains),
        residual_history=tuple(trace.residual_history),
        iterations=trace.iterations,
        converged=trace.converged,
        aod_support=aod_support,
        aoa_support=aoa_support,
    )


def cascaded_omp(Y_k, reflections, dict_R, dict_T, cfg: GreedyConfig) -> EstimateResult:
    return _kronecker_pursuit(Y_k, reflections, dict_R, dict_T, replace(cfg, look_ahead=1))


def cascaded_laomp(Y_k, reflections, dict_R, dict_T, cfg: GreedyConfig) -> EstimateResult:
    return _kronecker_pursuit(Y_k, reflections, dict_R, dict_T, cfg)


def cascaded_somp(Y_k: np.ndarray, reflections: np.ndarray, dict_R: Dictionary, cfg: GreedyConfig) -> EstimateResult:
    """MMV estimate of X A_T^H (AoA row support shared by the J columns); G = A_R X~."""
    sensing = reflections.conj().T @ dict_R.atoms
    result = somp_mmv(np.asarray(Y_k, dtype=complex).conj().T, sensing, cfg)
    G_hat = dict_R.atoms @ result.estimated_channel
    return replace(
        result,
        estimated_channel=ChannelMatrix(G_hat, LinkRole.CASCADED),
        aoa_support=result.support,
    )

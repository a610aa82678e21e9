# estimators/greedy.py
# ---------------------------------------------------------
# 1-D and MMV greedy solvers over an explicit dictionary.
#   omp       : single vector, no look-ahead
#   laomp     : single vector, look-ahead over cfg.look_ahead candidates
#   somp_mmv  : several vectors sharing one row support
# Dictionary columns need not be unit-norm; scores are normalized
# internally and coefficients refer to the columns as given.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import replace

import numpy as np

from channel.dictionary import SupportSet
from estimators.pursuit import (
    DenseOperator,
    EstimateResult,
    GreedyConfig,
    MatrixModel,
    PursuitTrace,
    pursue,
)


def _sparse_estimate(trace: PursuitTrace, n_atoms: int, n_columns: int) -> np.ndarray:
    x = np.zeros((n_atoms, n_columns), dtype=complex)
    if trace.support:
        x[trace.support] = trace.coefficients
    return x


def _result(trace: PursuitTrace, estimate: np.ndarray) -> EstimateResult:
    if trace.support:
        support = SupportSet(trace.support, trace.coefficients)
    else:
        support = SupportSet.empty()
    return EstimateResult(
        estimated_channel=estimate,
        support=support,
        residual_history=tuple(trace.residual_history),
        iterations=trace.iterations,
        converged=trace.converged,
    )


def _vector_pursuit(y: np.ndarray, dictionary: np.ndarray, cfg: GreedyConfig) -> EstimateResult:
    y = np.asarray(y, dtype=complex).reshape(-1)
    op = DenseOperator(dictionary)
    trace = pursue(MatrixModel(y, op, cfg.score), cfg)
    estimate = _sparse_estimate(trace, op.shape[1], 1)[:, 0]
    if trace.support:
        trace.coefficients = trace.coefficients[:, 0]
    return _result(trace, estimate)


def omp(y: np.ndarray, dictionary: np.ndarray, cfg: GreedyConfig) -> EstimateResult:
    return _vector_pursuit(y, dictionary, replace(cfg, look_ahead=1))


def laomp(y: np.ndarray, dictionary: np.ndarray, cfg: GreedyConfig) -> EstimateResult:
    return _vector_pursuit(y, dictionary, cfg)


def somp_mmv(Y: np.ndarray, dictionary: np.ndarray, cfg: GreedyConfig) -> EstimateResult:
    """Simultaneous OMP; the estimate is the row-sparse G x C coefficient matrix."""
    Y = np.asarray(Y, dtype=complex)
    if Y.ndim == 1:
        Y = Y[:, None]
    op = DenseOperator(dictionary)
    trace = pursue(MatrixModel(Y, op, cfg.score), replace(cfg, look_ahead=1))
    return _result(trace, _sparse_estimate(trace, op.shape[1], Y.shape[1]))

# estimators/pursuit.py
# ---------------------------------------------------------
# Greedy pursuit engine shared by OMP, LAOMP, SOMP and 3D-MLAOMP.
#
# The engine only talks to a measurement model:
#   scores(R)  -> one selection score per atom
#   fit(S)     -> LS coefficients on support S, residual, residual energy
# Models: a dense dictionary, an implicit Kronecker dictionary B kron A,
# and a third-order tensor observed through mode-1 contraction.
#
# Every iteration scores the residual, keeps the U best atoms outside the
# support and rolls each one forward greedily (look-ahead residual); the
# atom whose completed residual is smallest is committed. With U = 1 the
# rollout is skipped and the trajectory is plain (S)OMP.
#
# Ties: candidates are ordered by score, then by lowest atom index.
# Rollouts are ranked by completed residual; rollouts that meet the
# tolerance tie at zero and the one using fewer atoms wins, then the
# first in score order. Atoms that would make the support rank deficient
# are skipped.
# ---------------------------------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Protocol

import numpy as np
import scipy.linalg

from channel.dictionary import SupportSet
from tensor.core import ComplexTensor3, contract_mode1, frobenius_norm_sq, slice_l1_energies
from util.errors import InvalidArgumentError, SingularSystemError
from util.logger import get_logger

logger = get_logger("estimators.pursuit")

# Residual energy below this fraction of the observation energy is an exact fit.
EXACT_FIT_RATIO = 1e-20


class StopRule(str, Enum):
    RESIDUAL_THRESHOLD = "residual-threshold"
    KNOWN_SPARSITY = "known-sparsity"
    FIRST_OF_BOTH = "first-of-both"


class Score(str, Enum):
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class GreedyConfig:
    look_ahead: int = 1
    residual_tol: float = 0.0
    max_atoms: int = 1
    stop_rule: StopRule = StopRule.FIRST_OF_BOTH
    score: Score = Score.L1
    # atoms a look-ahead rollout may add, candidate included; None runs to the stop rule
    look_ahead_depth: int | None = None

    def __post_init__(self):
        if self.look_ahead < 1:
            raise InvalidArgumentError(f"look_ahead must be >= 1, got {self.look_ahead}")
        if self.max_atoms < 1:
            raise InvalidArgumentError(f"max_atoms must be >= 1, got {self.max_atoms}")
        if self.residual_tol < 0:
            raise InvalidArgumentError(f"residual_tol must be >= 0, got {self.residual_tol}")
        if self.look_ahead_depth is not None and self.look_ahead_depth < 1:
            raise InvalidArgumentError(f"look_ahead_depth must be >= 1, got {self.look_ahead_depth}")
        object.__setattr__(self, "stop_rule", StopRule(self.stop_rule))
        object.__setattr__(self, "score", Score(self.score))


@dataclass(frozen=True, eq=False)
class EstimateResult:
    """Solver output. `estimated_channel` is a coefficient array or a ChannelMatrix."""

    estimated_channel: Any
    support: SupportSet
    residual_history: tuple[float, ...] = ()
    iterations: int = 0
    converged: bool = True
    aod_support: SupportSet | None = None
    aoa_support: SupportSet | None = None


@dataclass
class PursuitTrace:
    support: list[int] = field(default_factory=list)
    coefficients: Any = None
    residual: Any = None
    residual_history: list[float] = field(default_factory=list)
    converged: bool = True

    @property
    def iterations(self) -> int:
        return len(self.support)


def noise_floor_tolerance(effective_noise_power: float, entries: int, scale: float = 1.5) -> float:
    """epsilon = c * sigma_eff^2 * (number of observed entries)."""
    return scale * effective_noise_power * entries


def solve_lstsq(A: np.ndarray, B: np.ndarray, block: str | None = None) -> np.ndarray:
    """Least squares through pivoted QR (gelsy); rank deficiency is an error."""
    if A.shape[1] > A.shape[0]:
        raise SingularSystemError(
            f"{A.shape[1]} unknowns but only {A.shape[0]} measurements"
            + (f" in {block}" if block else ""),
            block=block,
        )
    try:
        coef, _, rank, _ = scipy.linalg.lstsq(A, B, lapack_driver="gelsy")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"least squares failed: {exc}", block=block) from exc
    if rank < A.shape[1]:
        raise SingularSystemError(
            f"rank {rank} system with {A.shape[1]} unknowns" + (f" in {block}" if block else ""),
            block=block,
        )
    return coef


def _energy(matrix: np.ndarray) -> float:
    return float(np.vdot(matrix, matrix).real)


def _row_scores(corr: np.ndarray, score: Score) -> np.ndarray:
    magnitude = np.abs(corr)
    if score is Score.L1:
        return magnitude.sum(axis=1) ** 2
    return (magnitude ** 2).sum(axis=1)


# ---------------------------------------------------------
# Dictionary operators
# ---------------------------------------------------------

class DenseOperator:
    def __init__(self, matrix: np.ndarray):
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.ndim != 2:
            raise InvalidArgumentError(f"dictionary must be a matrix, got shape {self.matrix.shape}")
        self.column_norms = np.linalg.norm(self.matrix, axis=0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def adjoint(self, R: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ R

    def columns(self, indices) -> np.ndarray:
        return self.matrix[:, np.asarray(indices, dtype=int)]


class KroneckerOperator:
    """
    Implicit B kron A. Column c = i * N_a + j is B[:, i] kron A[:, j]; a
    measurement vector is vec (column-major) of an M_a x M_b matrix.
    """

    def __init__(self, B: np.ndarray, A: np.ndarray):
        self.B = np.asarray(B, dtype=complex)
        self.A = np.asarray(A, dtype=complex)
        self.column_norms = np.kron(np.linalg.norm(self.B, axis=0), np.linalg.norm(self.A, axis=0))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.B.shape[0] * self.A.shape[0], self.B.shape[1] * self.A.shape[1])

    def adjoint(self, R: np.ndarray) -> np.ndarray:
        m_a, m_b = self.A.shape[0], self.B.shape[0]
        out = []
        for col in R.T:
            mat = col.reshape(m_a, m_b, order="F")
            out.append((self.A.conj().T @ mat @ self.B.conj()).reshape(-1, order="F"))
        return np.stack(out, axis=1)

    def columns(self, indices) -> np.ndarray:
        n_a = self.A.shape[1]
        cols = [np.kron(self.B[:, c // n_a], self.A[:, c % n_a]) for c in np.asarray(indices, dtype=int)]
        if not cols:
            return np.zeros((self.shape[0], 0), dtype=complex)
        return np.stack(cols, axis=1)


# ---------------------------------------------------------
# Measurement models
# ---------------------------------------------------------

class PursuitModel(Protocol):
    n_atoms: int
    n_measurements: int
    observation_energy: float

    def observation(self) -> Any: ...

    def scores(self, residual) -> np.ndarray: ...

    def fit(self, support: list[int]) -> tuple[Any, Any, float]: ...


class MatrixModel:
    """Y (M x C) = D X with row-sparse X; C = 1 is the single-vector case."""

    def __init__(self, Y: np.ndarray, operator, score: Score = Score.L1):
        Y = np.asarray(Y, dtype=complex)
        self.Y = Y.reshape(-1, 1) if Y.ndim == 1 else Y
        if self.Y.shape[0] != operator.shape[0]:
            raise InvalidArgumentError(
                f"observation has {self.Y.shape[0]} rows, dictionary has {operator.shape[0]}"
            )
        self.operator = operator
        self.score = Score(score)
        self.n_measurements, self.n_atoms = operator.shape[0], operator.shape[1]
        self.observation_energy = _energy(self.Y)
        norms = operator.column_norms
        self._inv_norms = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)

    def observation(self) -> np.ndarray:
        return self.Y

    def scores(self, residual: np.ndarray) -> np.ndarray:
        corr = self.operator.adjoint(residual) * self._inv_norms[:, None]
        return _row_scores(corr, self.score)

    def fit(self, support: list[int]):
        A = self.operator.columns(support)
        coef = solve_lstsq(A, self.Y)
        residual = self.Y - A @ coef
        return coef, residual, _energy(residual)


class TensorModel:
    """Y (J x Q x K) = <A | Z> with Z sparse along mode 1."""

    def __init__(self, Y: ComplexTensor3, atoms: np.ndarray, score: Score = Score.L1):
        self.Y = Y
        self.atoms = np.asarray(atoms, dtype=complex)
        if self.atoms.shape[0] != Y.dims[0]:
            raise InvalidArgumentError(
                f"tensor mode-1 size {Y.dims[0]} does not match dictionary rows {self.atoms.shape[0]}"
            )
        self.score = Score(score)
        self.n_measurements, self.n_atoms = self.atoms.shape
        self.observation_energy = frobenius_norm_sq(Y)
        norms = np.linalg.norm(self.atoms, axis=0)
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        self._normalized_adjoint = (self.atoms * inv).conj().T

    def observation(self) -> ComplexTensor3:
        return self.Y

    def scores(self, residual: ComplexTensor3) -> np.ndarray:
        projection = contract_mode1(self._normalized_adjoint, residual)
        if self.score is Score.L1:
            return slice_l1_energies(projection)
        return (np.abs(projection.unfold()) ** 2).sum(axis=1)

    def fit(self, support: list[int]):
        A = self.atoms[:, support]
        _, d2, d3 = self.Y.dims
        Z = ComplexTensor3.fold(solve_lstsq(A, self.Y.unfold(), block="AoD support"), (len(support), d2, d3))
        residual = self.Y - contract_mode1(A, Z)
        return Z, residual, frobenius_norm_sq(residual)


# ---------------------------------------------------------
# Engine
# ---------------------------------------------------------

def _top_candidates(scores: np.ndarray, support: list[int], count: int) -> list[int]:
    order = np.lexsort((np.arange(scores.size), -scores))
    taken = set(support)
    picked = []
    for idx in order:
        if scores[idx] <= 0:
            break
        if int(idx) not in taken:
            picked.append(int(idx))
            if len(picked) == count:
                break
    return picked


class _Stopper:
    def __init__(self, model: PursuitModel, cfg: GreedyConfig):
        self.cfg = cfg
        self.cap = min(cfg.max_atoms, model.n_atoms, model.n_measurements)
        self.exact = EXACT_FIT_RATIO * model.observation_energy

    def tolerance_met(self, energy: float) -> bool:
        if energy <= self.exact:
            return True
        if self.cfg.stop_rule is StopRule.KNOWN_SPARSITY:
            return False
        return energy < self.cfg.residual_tol

    def done(self, size: int, energy: float) -> bool:
        return self.tolerance_met(energy) or size >= self.cap


def _try_fit(model: PursuitModel, support: list[int]):
    """model.fit, or None when the support is rank deficient."""
    try:
        return model.fit(support)
    except SingularSystemError:
        return None


def _look_ahead_residual(
    model: PursuitModel, stopper: _Stopper, support: list[int], candidate: int, depth: int | None
) -> tuple[float, int]:
    """
    Greedy completion of support + candidate. Returns (residual energy,
    atoms used); a completion that meets the tolerance scores 0 so the
    smaller support wins among those.
    """
    trial = support + [candidate]
    fitted = _try_fit(model, trial)
    if fitted is None:
        return math.inf, len(trial)
    _, residual, energy = fitted
    while not stopper.done(len(trial), energy):
        if depth is not None and len(trial) - len(support) >= depth:
            break
        nxt = _top_candidates(model.scores(residual), trial, 1)
        if not nxt:
            break
        fitted = _try_fit(model, trial + nxt)
        if fitted is None:
            break
        trial.append(nxt[0])
        _, residual, energy = fitted
    return (0.0 if stopper.tolerance_met(energy) else energy), len(trial)


def pursue(model: PursuitModel, cfg: GreedyConfig) -> PursuitTrace:
    trace = PursuitTrace(residual=model.observation())
    energy = model.observation_energy
    trace.residual_history.append(energy)
    if energy == 0.0:
        return trace

    stopper = _Stopper(model, cfg)
    while not stopper.done(len(trace.support), energy):
        candidates = _top_candidates(model.scores(trace.residual), trace.support, cfg.look_ahead)
        if len(candidates) > 1:
            completed = [
                _look_ahead_residual(model, stopper, trace.support, u, cfg.look_ahead_depth) for u in candidates
            ]
            candidates = [u for u, c in sorted(zip(candidates, completed), key=lambda pair: pair[1])]

        fitted = None
        for choice in candidates:
            fitted = _try_fit(model, trace.support + [choice])
            if fitted is not None:
                break
            logger.debug(f"Atom {choice} makes the support rank deficient; skipped")
        if fitted is None:
            break

        trace.support.append(choice)
        trace.coefficients, trace.residual, energy = fitted
        trace.residual_history.append(energy)

    if cfg.stop_rule is StopRule.KNOWN_SPARSITY:
        trace.converged = stopper.tolerance_met(energy) or len(trace.support) >= cfg.max_atoms
    else:
        trace.converged = stopper.tolerance_met(energy)
    if not trace.converged:
        logger.debug(
            f"Pursuit stopped unconverged: {len(trace.support)} atoms, residual={energy:.3e}, "
            f"tol={cfg.residual_tol:.3e}"
        )
    return trace

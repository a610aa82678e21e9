# tensor/core.py
# ---------------------------------------------------------
# Dense third-order complex tensor and the few operations the
# 3D pursuit needs: mode-1 contraction, slice l1 energy, Frobenius norm.
#
# Canonical layout: entry (i, j, k) sits at flat position
# i + d1*j + d1*d2*k (column-major). The mode-1 unfolding is then the
# d1 x (d2*d3) matrix whose column j + d2*k is the fiber T[:, j, k];
# contraction is a single matrix product against it.
# ---------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from util.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class ComplexTensor3:
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 3:
            raise InvalidArgumentError(f"ComplexTensor3 needs 3 axes, got shape {data.shape}")
        data = np.array(data, dtype=complex, order="F", copy=True)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        """Flat view in the canonical layout."""
        return self.data.reshape(-1, order="F")

    def unfold(self) -> np.ndarray:
        d1, d2, d3 = self.dims
        return self.data.reshape(d1, d2 * d3, order="F")

    @classmethod
    def fold(cls, matrix: np.ndarray, dims: tuple[int, int, int]) -> ComplexTensor3:
        d1, d2, d3 = dims
        matrix = np.asarray(matrix)
        if matrix.shape != (d1, d2 * d3):
            raise InvalidArgumentError(f"cannot fold {matrix.shape} into {dims}")
        return cls(matrix.reshape(d1, d2, d3, order="F"))

    @classmethod
    def from_entries(cls, entries, dims: tuple[int, int, int]) -> ComplexTensor3:
        entries = np.asarray(entries)
        if entries.size != int(np.prod(dims)):
            raise InvalidArgumentError(f"{entries.size} entries cannot fill dims {dims}")
        return cls(entries.reshape(dims, order="F"))

    @classmethod
    def zeros(cls, dims: tuple[int, int, int]) -> ComplexTensor3:
        return cls(np.zeros(dims, dtype=complex))

    def __sub__(self, other: ComplexTensor3) -> ComplexTensor3:
        if self.dims != other.dims:
            raise InvalidArgumentError(f"dims differ: {self.dims} vs {other.dims}")
        return ComplexTensor3(self.data - other.data)


def contract_mode1(A: np.ndarray, T: ComplexTensor3) -> ComplexTensor3:
    """out[i, q, k] = sum_g A[i, g] * T[g, q, k]."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[1] != T.dims[0]:
        raise InvalidArgumentError(
            f"cannot contract matrix {A.shape} with tensor {T.dims} along mode 1"
        )
    _, d2, d3 = T.dims
    return ComplexTensor3.fold(A @ T.unfold(), (A.shape[0], d2, d3))


def slice_l1_energies(T: ComplexTensor3) -> np.ndarray:
    """(sum |T[g, :, :]|)^2 for every mode-1 index g."""
    return np.abs(T.unfold()).sum(axis=1) ** 2


def slice_l1_energy(T: ComplexTensor3, g: int) -> float:
    if not 0 <= g < T.dims[0]:
        raise InvalidArgumentError(f"slice index {g} outside [0, {T.dims[0]})")
    return float(np.abs(T.data[g]).sum() ** 2)


def frobenius_norm_sq(T: ComplexTensor3) -> float:
    flat = T.entries
    return float(np.vdot(flat, flat).real)

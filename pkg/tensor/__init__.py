# tensor/__init__.py

from .core import ComplexTensor3, contract_mode1, frobenius_norm_sq, slice_l1_energies, slice_l1_energy

__all__ = [
    "ComplexTensor3",
    "contract_mode1",
    "frobenius_norm_sq",
    "slice_l1_energies",
    "slice_l1_energy",
]

import numpy as np
import pytest

from tensor.core import (
    ComplexTensor3,
    contract_mode1,
    frobenius_norm_sq,
    slice_l1_energies,
    slice_l1_energy,
)
from util.errors import InvalidArgumentError


def _random(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_contraction_matches_loops(rng):
    for _ in range(100):
        d1, d2, d3, n = (int(v) for v in rng.integers(1, 5, size=4))
        T = ComplexTensor3(_random(rng, (d1, d2, d3)))
        A = _random(rng, (n, d1))

        out = contract_mode1(A, T)
        expected = np.zeros((n, d2, d3), dtype=complex)
        for i in range(n):
            for q in range(d2):
                for k in range(d3):
                    for g in range(d1):
                        expected[i, q, k] += A[i, g] * T.data[g, q, k]
        assert out.dims == (n, d2, d3)
        assert np.linalg.norm(out.data - expected) <= 1e-12 * max(1.0, np.linalg.norm(expected))


def test_contraction_is_associative_and_bounded(rng):
    for _ in range(50):
        d1, d2, d3, n, p = (int(v) for v in rng.integers(1, 6, size=5))
        T = ComplexTensor3(_random(rng, (d1, d2, d3)))
        A = _random(rng, (n, d1))
        B = _random(rng, (p, n))

        nested = contract_mode1(B, contract_mode1(A, T))
        np.testing.assert_allclose(nested.data, contract_mode1(B @ A, T).data, atol=1e-10)

        bound = np.linalg.norm(A, 2) ** 2 * frobenius_norm_sq(T)
        assert frobenius_norm_sq(contract_mode1(A, T)) <= bound * (1 + 1e-12)


def test_slice_energies_match_loops(rng):
    for _ in range(100):
        dims = tuple(int(v) for v in rng.integers(1, 5, size=3))
        T = ComplexTensor3(_random(rng, dims))
        energies = slice_l1_energies(T)
        for g in range(dims[0]):
            total = 0.0
            for q in range(dims[1]):
                for k in range(dims[2]):
                    total += abs(T.data[g, q, k])
            assert energies[g] == pytest.approx(total ** 2, rel=1e-12)
            assert slice_l1_energy(T, g) == pytest.approx(total ** 2, rel=1e-12)


def test_canonical_layout():
    d1, d2, d3 = 2, 3, 4
    T = ComplexTensor3(np.arange(d1 * d2 * d3).reshape(d1, d2, d3))
    for i, j, k in [(1, 2, 3), (0, 1, 2), (1, 0, 0)]:
        assert T.entries[i + d1 * j + d1 * d2 * k] == T.data[i, j, k]
        assert T.unfold()[i, j + d2 * k] == T.data[i, j, k]


def test_fold_inverts_unfold(rng):
    T = ComplexTensor3(_random(rng, (3, 4, 2)))
    back = ComplexTensor3.fold(T.unfold(), T.dims)
    np.testing.assert_array_equal(back.data, T.data)
    np.testing.assert_array_equal(ComplexTensor3.from_entries(T.entries, T.dims).data, T.data)


def test_dimension_errors(rng):
    T = ComplexTensor3(_random(rng, (3, 2, 2)))
    with pytest.raises(InvalidArgumentError):
        contract_mode1(np.ones((2, 4)), T)
    with pytest.raises(InvalidArgumentError):
        slice_l1_energy(T, 3)
    with pytest.raises(InvalidArgumentError):
        ComplexTensor3(np.ones((2, 2)))
    with pytest.raises(InvalidArgumentError):
        ComplexTensor3.fold(np.ones((3, 5)), (3, 2, 2))


def test_frobenius_and_subtraction(rng):
    a = _random(rng, (2, 3, 2))
    T = ComplexTensor3(a)
    assert frobenius_norm_sq(T) == pytest.approx(np.sum(np.abs(a) ** 2))
    assert frobenius_norm_sq(T - T) == 0.0
    assert frobenius_norm_sq(ComplexTensor3.zeros((2, 2, 2))) == 0.0


def test_tensor_data_is_read_only(rng):
    T = ComplexTensor3(_random(rng, (2, 2, 2)))
    with pytest.raises(ValueError):
        T.data[0, 0, 0] = 1.0

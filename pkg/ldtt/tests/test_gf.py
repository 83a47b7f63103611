import numpy as np
import pytest

from ldtt.errors import DimMismatch, ModulusMismatch
from ldtt.gf import (Mat, block_diag, check_prime, cokernel, dsum, hstack,
                     idmat, inverse, invertible_mats, is_invertible,
                     kernel_basis, kron, rank, random_invertible, solve,
                     vstack)


def test_entries_are_reduced():
    m = Mat([[3, -1], [5, 4]], 3)
    assert m.entries == (0, 2, 2, 1)
    assert m == Mat([[0, 2], [2, 1]], 3)
    assert hash(m) == hash(Mat([[0, 2], [2, 1]], 3))


def test_column_vector_from_1d():
    assert Mat([1, 0, 1], 2).shape == (3, 1)


def test_matmul_checks_shapes_and_fields():
    with pytest.raises(DimMismatch):
        idmat(2, 2) @ idmat(3, 2)
    with pytest.raises(ModulusMismatch):
        idmat(2, 2) @ idmat(2, 3)


def test_kron_is_left_major():
    a = Mat([[1, 2]], 5)
    b = Mat([[1], [3]], 5)
    assert kron(a, b) == Mat([[1, 2], [3, 6]], 5)


def test_direct_sums():
    a, b = idmat(1, 2), Mat([[1, 1], [0, 1]], 2)
    assert dsum(a, b) == block_diag([a, b], 2)
    assert dsum(a, b).shape == (3, 3)


def test_stacks_of_nothing():
    assert hstack([], rows=2, p=3).shape == (2, 0)
    assert vstack([], cols=4, p=3).shape == (0, 4)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_inverse_roundtrip(rng, p):
    for _ in range(10):
        m = random_invertible(rng, 3, p)
        assert m @ inverse(m) == idmat(3, p)
        assert inverse(m) @ m == idmat(3, p)


def test_singular_has_no_inverse():
    m = Mat([[1, 1], [1, 1]], 2)
    assert not is_invertible(m)
    assert inverse(m) is None
    assert rank(m) == 1


def test_kernel_and_cokernel():
    m = Mat([[1, 1, 0], [0, 0, 0]], 3)
    k = kernel_basis(m)
    assert k.shape == (3, 2)
    assert (m @ k).is_zero()
    proj, dim = cokernel(m)
    assert dim == 1
    assert (proj @ m).is_zero()


def test_solve():
    m = Mat([[1, 2], [0, 1]], 7)
    v = Mat([[3], [4]], 7)
    x = solve(m, v)
    assert m @ x == v
    assert solve(Mat([[0], [0]], 7), Mat([[1], [0]], 7)) is None


def test_general_linear_group_orders():
    assert len(invertible_mats(1, 2)) == 1
    assert len(invertible_mats(2, 2)) == 6
    assert len(invertible_mats(2, 3)) == 48


def test_check_prime():
    assert check_prime(np.int64(7)) == 7
    with pytest.raises(ValueError):
        check_prime(9)

"""
Subspace algebra and matrix coercion tests
"""
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from subspaces import subspace as sp
from subspaces.matrix import DimensionMismatchError, as_matrix, is_exact, matmul
from subspaces.subspace import Tolerance


def test_kernel_and_image_dimensions():
    assert sp.kernel([[1, 0]]).dim == 1
    assert sp.image([[1, 2], [2, 4]]).dim == 1
    assert sp.kernel(np.zeros((0, 3))).dim == 3
    assert sp.image(np.zeros((3, 0))).dim == 0


def test_bases_are_orthonormal():
    V = sp.image([[1, 2], [3, 4], [5, 7]])
    assert np.allclose(V.basis.T @ V.basis, np.eye(V.dim))


def test_near_rank_deficient_matrix_counts_as_deficient():
    K = sp.kernel([[1, 1], [1, 1 + 1e-14]])
    assert K.dim == 1


def test_sum_and_intersection():
    V = sp.span([[1, 0, 0], [0, 1, 0]], 3)
    W = sp.span([[0, 1, 0], [0, 0, 1]], 3)
    meet = sp.intersect(V, W)
    assert meet.dim == 1
    assert sp.equals(meet, sp.span([[0, 1, 0]], 3))
    assert sp.sum(V, W).dim == 3


def test_preimage():
    M = np.array([[0, 1], [0, 0]])
    assert sp.preimage(M, sp.span([[1, 0]], 2)).dim == 2
    stays_zero = sp.preimage(M, sp.zero(2))
    assert sp.equals(stays_zero, sp.span([[1, 0]], 2))


def test_image_of_subspace():
    M = np.array([[0, 0], [1, 0]])
    assert sp.equals(sp.image_of(M, sp.span([[1, 0]], 2)), sp.span([[0, 1]], 2))
    assert sp.image_of(M, sp.span([[0, 1]], 2)).dim == 0


def test_contains_edge_cases():
    V = sp.span([[1, 1]], 2)
    assert sp.contains(V, sp.zero(2))
    assert sp.contains(sp.full(2), V)
    assert not sp.contains(V, sp.full(2))


def test_factor_projection():
    S = sp.span([[1, 1, 0, 0], [0, 0, 1, 1]], 4)
    first = sp.factor_project(S, (0, 2))
    assert first.dim == 1
    assert sp.equals(first, sp.span([[1, 1]], 2))
    assert sp.factor_project(S, slice(1, 3)).dim == 2


def test_product():
    P = sp.product(sp.span([[1, 0]], 2), sp.full(1))
    assert P.ambient_dim == 3 and P.dim == 2
    assert sp.equals(P, sp.span([[1, 0, 0], [0, 0, 1]], 3))


def test_coordinate_lift():
    lifted = sp.coordinate_lift(sp.span([[1, 1]], 2), [0, 2], 3)
    assert lifted.dim == 2
    assert sp.equals(lifted, sp.span([[1, 0, 1], [0, 1, 0]], 3))


# Properties on random instances

def _low_rank(rng, rows, cols, rank):
    """Integer matrix of rank at most ``rank``."""
    return (rng.integers(-3, 4, size=(rows, rank)) @ rng.integers(-3, 4, size=(rank, cols))).astype(float)


def _unimodular(rng, n):
    """Invertible integer matrix: unit upper triangular times a permutation."""
    T = np.eye(n) + np.triu(rng.integers(-2, 3, size=(n, n)), k=1)
    return T[:, rng.permutation(n)]


@pytest.mark.parametrize("seed", range(25))
def test_image_of_a_basis_is_the_subspace(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    V = sp.image(_low_rank(rng, n, int(rng.integers(1, 7)), int(rng.integers(0, n + 1))))
    again = sp.image(V.basis)
    assert again.dim == V.dim
    assert sp.equals(again, V)


@pytest.mark.parametrize("seed", range(25))
def test_rank_plus_nullity_is_column_count(seed):
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    M = _low_rank(rng, rows, cols, int(rng.integers(0, min(rows, cols) + 1)))
    assert sp.image(M).dim + sp.kernel(M).dim == cols
    assert np.allclose(M @ sp.kernel(M).basis, 0.0)


@pytest.mark.parametrize("seed", range(25))
def test_sum_and_intersection_dimensions_add_up(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    shared = _low_rank(rng, n, 2, int(rng.integers(0, 2)))
    V = sp.image(np.hstack([_low_rank(rng, n, 2, int(rng.integers(0, 3))), shared]))
    W = sp.image(np.hstack([_low_rank(rng, n, 2, int(rng.integers(0, 3))), shared]))
    assert sp.sum(V, W).dim + sp.intersect(V, W).dim == V.dim + W.dim
    assert sp.contains(sp.sum(V, W), V)
    assert sp.contains(W, sp.intersect(V, W))


@pytest.mark.parametrize("seed", range(25))
def test_preimage_is_monotone(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    M = _low_rank(rng, m, n, int(rng.integers(1, min(m, n) + 1)))
    W1 = sp.image(_low_rank(rng, m, 2, int(rng.integers(0, 3))))
    W2 = sp.sum(W1, sp.image(_low_rank(rng, m, 2, int(rng.integers(0, 3)))))
    assert sp.contains(sp.preimage(M, W2), sp.preimage(M, W1))
    assert sp.contains(sp.preimage(M, W1), sp.kernel(M))


@pytest.mark.parametrize("seed", range(25))
def test_results_ignore_the_choice_of_spanning_set(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    M1 = _low_rank(rng, n, 3, int(rng.integers(0, 4)))
    M2 = _low_rank(rng, n, 3, int(rng.integers(0, 4)))
    T1, T2 = _unimodular(rng, 3), _unimodular(rng, 3)
    V, W = sp.image(M1), sp.image(M2)
    V_other, W_other = sp.image(M1 @ T1), sp.image(M2 @ T2)
    assert sp.equals(V, V_other)
    assert sp.equals(sp.sum(V, W), sp.sum(V_other, W_other))
    assert sp.equals(sp.intersect(V, W), sp.intersect(V_other, W_other))
    A = rng.integers(-2, 3, size=(n, n)).astype(float)
    assert sp.equals(sp.preimage(A, V), sp.preimage(A, V_other))


def test_ambient_mismatch_raises():
    with pytest.raises(DimensionMismatchError):
        sp.intersect(sp.full(2), sp.full(3))
    with pytest.raises(DimensionMismatchError):
        sp.preimage(np.eye(2), sp.full(3))


def test_tolerance_bounds():
    assert Tolerance().rank_rel == 1e-10
    assert Tolerance().inclusion == 1e-8
    with pytest.raises(ValidationError):
        Tolerance(rank_rel=0)
    with pytest.raises(ValidationError):
        Tolerance(inclusion=1.0)


def test_as_matrix_coercion():
    assert as_matrix([[1, 2]]).dtype == float
    assert as_matrix([], shape=(0, 3)).shape == (0, 3)
    half = as_matrix([["1/2", 1]])
    assert is_exact(half)
    assert half[0, 0] == Fraction(1, 2)
    with pytest.raises(ValueError, match="ragged"):
        as_matrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        as_matrix([[float("nan")]])
    with pytest.raises(ValueError):
        as_matrix([[True]])


def test_matrices_are_read_only():
    M = as_matrix([[1, 2]])
    with pytest.raises(ValueError):
        M[0, 0] = 5


def test_exact_product():
    product = matmul(as_matrix([["1/2"]]), as_matrix([["1/3"]]))
    assert is_exact(product)
    assert product[0, 0] == Fraction(1, 6)
    assert matmul(as_matrix([[1, 2]]), as_matrix([[3], [4]]))[0, 0] == 11.0

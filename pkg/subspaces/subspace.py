"""Rank-revealing subspace algebra over real matrices.

A subspace is carried by an orthonormal basis matrix. Rank decisions use the singular
values of the input with a cutoff of ``rank_rel * sigma_max * max(rows, cols)``;
inclusion decisions use the spectral norm of the projection residual.
"""
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from subspaces.matrix import DimensionMismatchError, as_float

DEFAULT_RANK_REL = 1e-10
DEFAULT_INCLUSION = 1e-8


class Tolerance(BaseModel):
    """Numerical cutoffs used by every subspace decision."""

    model_config = ConfigDict(frozen=True)

    rank_rel: float = Field(default=DEFAULT_RANK_REL, gt=0, lt=1)
    inclusion: float = Field(default=DEFAULT_INCLUSION, gt=0, lt=1)


DEFAULT_TOLERANCE = Tolerance()


class Subspace(BaseModel):
    """A linear subspace of R^n given by an orthonormal basis (n x dim)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    basis: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def complement_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.projector()

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _subspace(basis: np.ndarray) -> Subspace:
    basis = np.array(basis, dtype=float)
    basis.flags.writeable = False
    return Subspace(basis=basis)


def zero(n: int) -> Subspace:
    return _subspace(np.zeros((n, 0)))


def full(n: int) -> Subspace:
    return _subspace(np.eye(n))


def _rank(singular_values: np.ndarray, shape: tuple[int, int], tol: Tolerance,
          scale: float = 0.0) -> int:
    # scale: norm of the operand the matrix was derived from, so round-off left over
    # from a cancellation is not mistaken for rank
    reference = max(singular_values[0] if singular_values.size else 0.0, scale)
    if reference == 0.0:
        return 0
    cutoff = tol.rank_rel * reference * max(shape)
    return int(np.count_nonzero(singular_values > cutoff))


def image(M, tol: Tolerance = DEFAULT_TOLERANCE, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the column span of M."""
    M = as_float(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return zero(rows)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return _subspace(U[:, : _rank(s, M.shape, tol, scale)])


def image_of(M, V: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """M V, with rank judged against the norm of M."""
    M = as_float(M)
    if M.shape[1] != V.ambient_dim:
        raise DimensionMismatchError(
            f"image_of: map has {M.shape[1]} columns but V lives in R^{V.ambient_dim}"
        )
    if M.size == 0:
        return zero(M.shape[0])
    return image(M @ V.basis, tol, scale=float(np.linalg.norm(M, 2)))


def kernel(M, tol: Tolerance = DEFAULT_TOLERANCE, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of {x : Mx = 0}."""
    M = as_float(M)
    rows, cols = M.shape
    if cols == 0:
        return zero(0)
    if rows == 0:
        return full(cols)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    r = _rank(s, M.shape, tol, scale)
    return _subspace(Vt[r:].T)


def _check_ambient(V: Subspace, W: Subspace, op: str) -> None:
    if V.ambient_dim != W.ambient_dim:
        raise DimensionMismatchError(
            f"{op}: ambient dimensions differ ({V.ambient_dim} vs {W.ambient_dim})"
        )


def sum(V: Subspace, W: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:  # noqa: A001
    """V + W."""
    _check_ambient(V, W, "sum")
    return image(np.hstack([V.basis, W.basis]), tol)


def intersect(V: Subspace, W: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """V ∩ W as the kernel of the stacked complement projectors."""
    _check_ambient(V, W, "intersect")
    if V.dim == 0 or W.dim == 0:
        return zero(V.ambient_dim)
    stacked = np.vstack([V.complement_projector(), W.complement_projector()])
    return kernel(stacked, tol, scale=1.0)


def preimage(M, W: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """{x : Mx ∈ W}."""
    M = as_float(M)
    if M.shape[0] != W.ambient_dim:
        raise DimensionMismatchError(
            f"preimage: map has {M.shape[0]} rows but W lives in R^{W.ambient_dim}"
        )
    if M.size == 0:
        return full(M.shape[1])
    return kernel(W.complement_projector() @ M, tol, scale=float(np.linalg.norm(M, 2)))


def contains(V: Subspace, W: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff W ⊂ V within ``tol.inclusion``."""
    _check_ambient(V, W, "contains")
    if W.dim == 0 or V.ambient_dim == 0:
        return True
    residual = V.complement_projector() @ W.basis
    return bool(np.linalg.norm(residual, 2) <= tol.inclusion)


def equals(V: Subspace, W: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return contains(V, W, tol) and contains(W, V, tol)


def _block_range(block, ambient_dim: int) -> slice:
    if isinstance(block, slice):
        start, stop, step = block.indices(ambient_dim)
        if step != 1:
            raise ValueError("factor_project: block must be a contiguous range")
    else:
        start, stop = block
    if not 0 <= start <= stop <= ambient_dim:
        raise ValueError(f"factor_project: block [{start}, {stop}) outside R^{ambient_dim}")
    return slice(start, stop)


def factor_project(S: Subspace, block, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Projection of S onto the coordinates in ``block`` (a slice or a (start, stop) pair)."""
    rows = _block_range(block, S.ambient_dim)
    return image(S.basis[rows], tol, scale=1.0 if S.dim else 0.0)


def product(V: Subspace, W: Subspace) -> Subspace:
    """V × W in R^(n_V + n_W)."""
    basis = np.zeros((V.ambient_dim + W.ambient_dim, V.dim + W.dim))
    basis[: V.ambient_dim, : V.dim] = V.basis
    basis[V.ambient_dim :, V.dim :] = W.basis
    return _subspace(basis)


def selector(positions: Sequence[int], n: int) -> np.ndarray:
    """Matrix picking the listed coordinates out of R^n."""
    P = np.zeros((len(positions), n))
    for row, col in enumerate(positions):
        P[row, col] = 1.0
    return P


def coordinate_lift(S: Subspace, positions: Sequence[int], n: int,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """{z ∈ R^n : z[positions] ∈ S}."""
    if len(positions) != S.ambient_dim:
        raise DimensionMismatchError(
            f"coordinate_lift: {len(positions)} positions for a subspace of R^{S.ambient_dim}"
        )
    return preimage(selector(positions, n), S, tol)


def span(vectors, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Subspace spanned by the given vectors (each of length n)."""
    vectors = [np.asarray(v, dtype=float).reshape(n) for v in vectors]
    if not vectors:
        return zero(n)
    return image(np.column_stack(vectors), tol)

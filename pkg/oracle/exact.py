"""Exact rational re-implementation of the consistent subspace and relation fixed points.

Uses sympy's fraction-exact elimination and no tolerances. It shares no code with the
float path in ``subspaces`` so the two can be compared.
"""
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict

from systems.models import ConstrainedSystem, DimensionMismatchError


class NonRationalError(ValueError):
    """An entry cannot be taken as an exact rational."""


class ExactDims(BaseModel):
    model_config = ConfigDict(frozen=True)

    v_dim: int
    v2_dim: Optional[int] = None
    relation_dim: Optional[int] = None
    full: Optional[bool] = None
    side_condition_ok: Optional[bool] = None

    @property
    def holds(self) -> Optional[bool]:
        if self.full is None:
            return None
        return self.full and self.side_condition_ok


def _rational(value, where: str) -> sympy.Rational:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (int, np.integer)):
        return sympy.Integer(int(value))
    value = float(value)
    if not np.isfinite(value):
        raise NonRationalError(f"{where}: entry {value} is not finite")
    if not value.is_integer():
        raise NonRationalError(
            f"{where}: entry {value!r} is a binary float; write it as a \"p/q\" string for exact checks"
        )
    return sympy.Integer(int(value))


def to_rational(M: np.ndarray, where: str = "matrix") -> sympy.Matrix:
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return sympy.zeros(rows, cols)
    return sympy.Matrix(rows, cols, [_rational(v, where) for v in M.ravel().tolist()])


def _kernel(M: sympy.Matrix) -> sympy.Matrix:
    if M.cols == 0:
        return sympy.zeros(0, 0)
    if M.rows == 0:
        return sympy.eye(M.cols)
    vectors = M.nullspace()
    return sympy.Matrix.hstack(*vectors) if vectors else sympy.zeros(M.cols, 0)


def _image(M: sympy.Matrix) -> sympy.Matrix:
    if M.rows == 0 or M.cols == 0:
        return sympy.zeros(M.rows, 0)
    vectors = M.columnspace()
    return sympy.Matrix.hstack(*vectors) if vectors else sympy.zeros(M.rows, 0)


def _sum(V: sympy.Matrix, W: sympy.Matrix) -> sympy.Matrix:
    if V.cols == 0:
        return _image(W)
    if W.cols == 0:
        return _image(V)
    return _image(V.row_join(W))


def _intersect(V: sympy.Matrix, W: sympy.Matrix) -> sympy.Matrix:
    if V.cols == 0 or W.cols == 0:
        return sympy.zeros(V.rows, 0)
    coefficients = _kernel(V.row_join(-W))
    if coefficients.cols == 0:
        return sympy.zeros(V.rows, 0)
    return _image(V * coefficients[: V.cols, :])


def _annihilator(W: sympy.Matrix) -> sympy.Matrix:
    """Rows spanning the left null space of W."""
    if W.cols == 0:
        return sympy.eye(W.rows)
    vectors = W.T.nullspace()
    if not vectors:
        return sympy.zeros(0, W.rows)
    return sympy.Matrix.vstack(*[v.T for v in vectors])


def _preimage(M: sympy.Matrix, W: sympy.Matrix) -> sympy.Matrix:
    N = _annihilator(W)
    if N.rows == 0 or M.cols == 0:
        return sympy.eye(M.cols)
    if M.rows == 0:
        return sympy.eye(M.cols)
    return _kernel(N * M)


def _block_diag(X: sympy.Matrix, Y: sympy.Matrix) -> sympy.Matrix:
    out = sympy.zeros(X.rows + Y.rows, X.cols + Y.cols)
    if X.rows and X.cols:
        out[: X.rows, : X.cols] = X
    if Y.rows and Y.cols:
        out[X.rows :, X.cols :] = Y
    return out


def _fixed_point(start: sympy.Matrix, A: sympy.Matrix, imG: sympy.Matrix) -> sympy.Matrix:
    current = start
    while True:
        following = _intersect(current, _preimage(A, _sum(current, imG)))
        if following.cols == current.cols:
            return current
        current = following


def _matrices(x: ConstrainedSystem, label: str) -> dict[str, sympy.Matrix]:
    return {name: to_rational(M, f"{label}.{name}") for name, M in x.matrices().items()}


def exact_consistent_subspace(x: ConstrainedSystem, label: str = "system") -> sympy.Matrix:
    """Basis (as columns) of the consistent subspace in exact arithmetic."""
    m = _matrices(x, label)
    ker_h = _kernel(m["H"]) if m["H"].rows else sympy.eye(x.n)
    return _fixed_point(ker_h, m["A"], _image(m["G"]))


def _rank(M: sympy.Matrix) -> int:
    return M.rank() if M.rows and M.cols else 0


def exact_relation(x1: ConstrainedSystem, x2: ConstrainedSystem) -> tuple[sympy.Matrix, ExactDims]:
    """Largest simulation relation of x1 by x2 in exact arithmetic, with the verdict pieces."""
    if x1.w != x2.w:
        raise DimensionMismatchError(
            f"simulation needs equal output dimensions, got {x1.w} and {x2.w}"
        )
    m1, m2 = _matrices(x1, "x1"), _matrices(x2, "x2")
    V1 = exact_consistent_subspace(x1, "x1")
    V2 = exact_consistent_subspace(x2, "x2")
    n1, n2 = x1.n, x2.n

    output_match = _kernel(m1["C"].row_join(-m2["C"])) if x1.w else sympy.eye(n1 + n2)
    start = _intersect(_block_diag(V1, V2), output_match)
    A = _block_diag(m1["A"], m2["A"])
    G = _block_diag(m1["G"], m2["G"])
    S = _fixed_point(start, A, _image(G))

    full = _rank(S[:n1, :]) == V1.cols if S.cols else V1.cols == 0

    moves = _intersect(V1, _image(m1["G"]))
    matched = _sum(S, _image(sympy.zeros(n1, x2.s).col_join(m2["G"])))
    lifted_moves = moves.col_join(sympy.zeros(n2, moves.cols))
    side_ok = _rank(_sum(matched, lifted_moves)) == matched.cols

    dims = ExactDims(
        v_dim=V1.cols, v2_dim=V2.cols, relation_dim=S.cols, full=full, side_condition_ok=side_ok
    )
    return S, dims


def exact_subspace_dims(x1: ConstrainedSystem, x2: Optional[ConstrainedSystem] = None) -> ExactDims:
    """dim V of x1 and, when x2 is given, the dimensions and verdict pieces of x1 ≼ x2."""
    if x2 is None:
        return ExactDims(v_dim=exact_consistent_subspace(x1).cols)
    return exact_relation(x1, x2)[1]

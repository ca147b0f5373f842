"""Matrix coercion helpers.

System matrices are stored as read-only 2-D numpy arrays. A matrix whose entries are
all exact rationals, at least one of them non-integral, is kept as an object array of
``fractions.Fraction`` so the exact oracle can recover it. Every other matrix is
float64. Numerical code always goes through ``as_float``.
"""
from fractions import Fraction
from numbers import Integral
from typing import Sequence

import numpy as np


class DimensionMismatchError(ValueError):
    """Raised when operands do not have compatible shapes."""


def parse_entry(value):
    """Convert a single matrix entry to int, Fraction or float.

    Strings are read as exact rationals ("3", "-1/2"). Booleans are rejected.
    """
    if isinstance(value, bool):
        raise ValueError(f"boolean entry {value!r} is not a number")
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"cannot read {value!r} as an exact rational") from e
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            raise ValueError(f"entry {value!r} is not finite")
        return value
    raise ValueError(f"unsupported entry {value!r}")


def _is_exact_entry(value) -> bool:
    return isinstance(value, (Integral, Fraction)) or (
        isinstance(value, float) and value.is_integer()
    )


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def as_matrix(value, shape: tuple[int | None, int | None] | None = None) -> np.ndarray:
    """Coerce ``value`` into a read-only 2-D matrix.

    ``shape`` only gives an empty input (``[]``) its intended shape, e.g. a constraint
    matrix with zero rows and ``n`` columns is ``as_matrix([], shape=(0, n))``.
    """
    if isinstance(value, np.ndarray):
        if value.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got {value.ndim} dimension(s)")
        if value.dtype != object:
            array = np.array(value, dtype=float)
            if not np.all(np.isfinite(array)):
                raise ValueError("matrix entries must be finite")
            return _freeze(array)
        n_rows, n_cols = value.shape
        rows = value.tolist()
    else:
        try:
            rows = [list(row) for row in value]
        except TypeError as e:
            raise ValueError("a matrix must be given as a list of rows") from e
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise ValueError(f"ragged rows with lengths {sorted(widths)}")
        n_rows = len(rows)
        n_cols = widths.pop() if widths else 0
        if n_rows == 0 and shape is not None:
            n_rows = shape[0] or 0
            n_cols = shape[1] or 0

    if n_rows == 0 or n_cols == 0:
        return _freeze(np.zeros((n_rows, n_cols)))

    entries = [[parse_entry(v) for v in row] for row in rows]
    flat = [v for row in entries for v in row]
    if all(_is_exact_entry(v) for v in flat) and any(
        isinstance(v, Fraction) and v.denominator != 1 for v in flat
    ):
        array = np.empty((n_rows, n_cols), dtype=object)
        for i, row in enumerate(entries):
            for j, v in enumerate(row):
                array[i, j] = Fraction(int(v)) if isinstance(v, float) else Fraction(v)
        return _freeze(array)
    return _freeze(np.array([[float(v) for v in row] for row in entries], dtype=float))


def is_exact(matrix: np.ndarray) -> bool:
    """True when the matrix carries Fraction entries (object dtype)."""
    return matrix.dtype == object


def as_float(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix, dtype=float)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product that stays exact when either operand carries Fractions."""
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    if not (is_exact(a) or is_exact(b)):
        return as_matrix(as_float(a) @ as_float(b))
    if not all(_is_exact_entry(v) for v in list(a.flat) + list(b.flat)):
        return as_matrix(as_float(a) @ as_float(b))
    out = np.empty((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum(
                (Fraction(a[i, k]) * Fraction(b[k, j]) for k in range(a.shape[1])),
                Fraction(0),
            )
    return as_matrix(out)


def block(rows: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """``np.block`` that keeps Fraction entries when any block carries them."""
    if any(is_exact(b) for row in rows for b in row):
        return as_matrix(np.block([[b.astype(object) for b in row] for row in rows]))
    return as_matrix(np.block([[as_float(b) for b in row] for row in rows]))


def zeros(rows: int, cols: int) -> np.ndarray:
    return _freeze(np.zeros((rows, cols)))


def negate(matrix: np.ndarray) -> np.ndarray:
    if is_exact(matrix):
        return as_matrix(-matrix)
    return as_matrix(-as_float(matrix))

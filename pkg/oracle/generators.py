"""Seeded random systems with small-integer entries.

Entries are integral so the exact oracle accepts them unchanged. A share of the entries is
zeroed to make rank drops and nontrivial consistent subspaces common.
"""
from typing import Optional

import numpy as np

from systems.models import ConstrainedSystem, DrivenSystem


def _integer_matrix(rng: np.random.Generator, rows: int, cols: int,
                    bound: int, density: float) -> np.ndarray:
    values = rng.integers(-bound, bound + 1, size=(rows, cols))
    mask = rng.random((rows, cols)) < density
    return (values * mask).astype(float)


def random_rational_system(seed: int, n: Optional[int] = None, w: Optional[int] = None,
                           q: Optional[int] = None, s: Optional[int] = None,
                           bound: int = 2, density: float = 0.6,
                           max_states: int = 5) -> ConstrainedSystem:
    """Random constrained system; unspecified dimensions are drawn too (n ≤ max_states)."""
    rng = np.random.default_rng(seed)
    n = n if n is not None else int(rng.integers(1, max_states + 1))
    w = w if w is not None else int(rng.integers(0, n + 1))
    q = q if q is not None else int(rng.integers(0, n + 1))
    s = s if s is not None else int(rng.integers(0, n + 1))
    return ConstrainedSystem(
        A=_integer_matrix(rng, n, n, bound, density),
        G=_integer_matrix(rng, n, s, bound, density),
        C=_integer_matrix(rng, w, n, bound, density),
        H=_integer_matrix(rng, q, n, bound, density),
    )


def random_driven_system(seed: int, n: int, m: int, p: int, s: int = 0,
                         bound: int = 2, density: float = 0.6) -> DrivenSystem:
    rng = np.random.default_rng(seed)
    return DrivenSystem(
        A=_integer_matrix(rng, n, n, bound, density),
        B=_integer_matrix(rng, n, m, bound, density),
        C=_integer_matrix(rng, p, n, bound, density),
        G=_integer_matrix(rng, n, s, bound, density),
    )

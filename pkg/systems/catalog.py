"""Bundled example systems and constructions of compatible environments and implementations.

The integrator contract: the assumption leaves u free (u' = d_a), the guarantee is a
single integrator y' = u.
"""
from typing import Optional

import numpy as np

from subspaces.matrix import as_float, block, zeros
from systems.models import ConstrainedSystem, Contract, DrivenSystem, GuaranteeSystem, require_valid


def example_assumption() -> ConstrainedSystem:
    """x_a' = d_a, u = x_a."""
    return ConstrainedSystem(A=[[0]], G=[[1]], C=[[1]])


def example_guarantee() -> GuaranteeSystem:
    """x_g1' = d_g, x_g2' = x_g1, u = x_g1, y = x_g2."""
    return GuaranteeSystem.from_blocks(
        A=[[0, 0], [1, 0]], G=[[1], [0]], Cu=[[1, 0]], Cy=[[0, 1]]
    )


def example_contract() -> Contract:
    return Contract(assumption=example_assumption(), guarantee=example_guarantee())


def double_integrator_guarantee() -> GuaranteeSystem:
    """x1' = d, x2' = x1, x3' = x2, u = x1, y = x3, so y'' = u."""
    return GuaranteeSystem.from_blocks(
        A=[[0, 0, 0], [1, 0, 0], [0, 1, 0]],
        G=[[1], [0], [0]],
        Cu=[[1, 0, 0]],
        Cy=[[0, 0, 1]],
    )


def single_integrator_plant() -> DrivenSystem:
    """x' = u, y = x."""
    return DrivenSystem(A=[[0]], B=[[1]], C=[[1]])


def zero_output_plant() -> DrivenSystem:
    """x' = u, y = 0."""
    return DrivenSystem(A=[[0]], B=[[1]], C=[[0]])


def free_derivative_system(w: int = 1) -> ConstrainedSystem:
    """x' = d, output x: every output with a derivative is possible."""
    return ConstrainedSystem(A=np.zeros((w, w)), G=np.eye(w), C=np.eye(w))


def frozen_system(w: int = 1) -> ConstrainedSystem:
    """x' = 0, output x: constant outputs only."""
    return ConstrainedSystem(A=np.zeros((w, w)), C=np.eye(w))


def free_output_guarantee(a: ConstrainedSystem, y_dim: int = 1) -> GuaranteeSystem:
    """Guarantee whose u part copies the assumption a and whose y = x_h is free (x_h' = d_h)."""
    A = block([[a.A, zeros(a.n, y_dim)], [zeros(y_dim, a.n), zeros(y_dim, y_dim)]])
    G = block([[a.G, zeros(a.n, y_dim)], [zeros(y_dim, a.s), np.eye(y_dim)]])
    Cu = block([[a.C, zeros(a.w, y_dim)]])
    Cy = block([[zeros(y_dim, a.n), np.eye(y_dim)]])
    H = block([[a.H, zeros(a.q, y_dim)]])
    return GuaranteeSystem.from_blocks(A, G, Cu, Cy, H)


def free_output_contract(a: Optional[ConstrainedSystem] = None, y_dim: int = 1) -> Contract:
    """Contract every dimension-compatible plant implements."""
    a = a if a is not None else example_assumption()
    return Contract(assumption=a, guarantee=free_output_guarantee(a, y_dim))


def frozen_input_contract(y_dim: int = 1) -> Contract:
    """Constant inputs only, outputs unrestricted."""
    return free_output_contract(frozen_system(1), y_dim)


# Environments compatible with a given assumption by construction.

def _stable_block(rng: np.random.Generator, size: int) -> np.ndarray:
    """Lower triangular with diagonal in {-1, -2}, so hidden states stay bounded."""
    X = np.tril(rng.integers(-2, 3, size=(size, size)), k=-1).astype(float)
    return X - np.diag(rng.integers(1, 3, size=size))


def hidden_state_environment(a: ConstrainedSystem, extra: int, seed: int = 0,
                             driven: bool = True) -> ConstrainedSystem:
    """The assumption plus unobserved states that read x_a but never feed back."""
    rng = np.random.default_rng(seed)
    X = _stable_block(rng, extra)
    Y = rng.integers(-2, 3, size=(extra, a.n)).astype(float)
    G_hidden = np.eye(extra) if driven else np.zeros((extra, 0))
    A = block([[as_float(a.A), zeros(a.n, extra)], [Y, X]])
    G = block([[as_float(a.G), zeros(a.n, G_hidden.shape[1])], [zeros(extra, a.s), G_hidden]])
    C = block([[as_float(a.C), zeros(a.w, extra)]])
    H = block([[as_float(a.H), zeros(a.q, extra)]])
    return require_valid(ConstrainedSystem(A=A, G=G, C=C, H=H), "hidden-state environment")


def restricted_driving_environment(a: ConstrainedSystem, T) -> ConstrainedSystem:
    """G_e = G_a T: only some of the assumption's driving directions are used."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != a.s:
        raise ValueError(f"T must have {a.s} rows, got shape {T.shape}")
    G = as_float(a.G) @ T
    return require_valid(ConstrainedSystem(A=a.A, G=G, C=a.C, H=a.H), "restricted environment")


def extra_constraint_environment(a: ConstrainedSystem, rows) -> ConstrainedSystem:
    """The assumption with additional constraint rows appended to H."""
    rows = np.asarray(rows, dtype=float).reshape(-1, a.n)
    H = block([[as_float(a.H)], [rows]])
    return require_valid(ConstrainedSystem(A=a.A, G=a.G, C=a.C, H=H), "constrained environment")


def similar_environment(a: ConstrainedSystem, T) -> ConstrainedSystem:
    """Same system in the coordinates x_a = T x_e (T invertible)."""
    T = np.asarray(T, dtype=float)
    T_inv = np.linalg.inv(T)
    return require_valid(
        ConstrainedSystem(
            A=T_inv @ as_float(a.A) @ T,
            G=T_inv @ as_float(a.G),
            C=as_float(a.C) @ T,
            H=as_float(a.H) @ T,
        ),
        "similar environment",
    )


def compatible_environments(a: ConstrainedSystem, seed: int = 0) -> list[ConstrainedSystem]:
    """Five environments compatible with a, one per construction above."""
    rng = np.random.default_rng(seed)
    T = np.eye(a.n)
    if a.n > 1:
        T[0, 1:] = rng.integers(-2, 3, size=a.n - 1)
    else:
        T = -T
    extra_row = np.zeros((1, a.n + 1))
    extra_row[0, -1] = 1.0
    return [
        a,
        hidden_state_environment(a, extra=2, seed=seed),
        restricted_driving_environment(a, np.zeros((a.s, 0)) if seed % 2 else 2 * np.eye(a.s)),
        extra_constraint_environment(hidden_state_environment(a, extra=1, seed=seed + 1), extra_row),
        similar_environment(a, T),
    ]


def hidden_state_plant(extra: int, seed: int = 0, disturbed: bool = False) -> DrivenSystem:
    """Single integrator y = x_1, x_1' = u, plus hidden states that never reach x_1 or y."""
    rng = np.random.default_rng(seed)
    n = extra + 1
    A = np.zeros((n, n))
    A[1:, 0] = rng.integers(-2, 3, size=extra)
    A[1:, 1:] = _stable_block(rng, extra)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    B[1:, 0] = rng.integers(-2, 3, size=extra)
    C = np.zeros((1, n))
    C[0, 0] = 1.0
    G = np.vstack([np.zeros((1, extra)), np.eye(extra)]) if disturbed else np.zeros((n, 0))
    return DrivenSystem(A=A, B=B, C=C, G=G)


def integrator_implementations(count: int = 10, seed: int = 0) -> list[DrivenSystem]:
    """Plants implementing the integrator contract."""
    plants = [single_integrator_plant()]
    for k in range(count - 1):
        plants.append(hidden_state_plant(extra=1 + k % 3, seed=seed + k, disturbed=bool(k % 2)))
    return plants

"""Trajectory-level confirmation of simulation verdicts.

Consistent trajectories are generated with a friend feedback: d = F x + D v where
(A + G F) V ⊂ V and the columns of D span the admissible directions {δ : G δ ∈ V}. The
excitation v is drawn per step and held over the step. The closed loop is linear, so each
step uses the classical fourth-order Runge-Kutta step matrices of that loop.
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from subspaces.subspace import DEFAULT_TOLERANCE, Subspace, Tolerance
from systems.models import ConstrainedSystem, DimensionMismatchError
from verification.simulation import admissible_directions, consistent_subspace, friend

DEFAULT_HORIZON = 5.0
DEFAULT_DT = 1e-3
TRAJECTORY_TOLERANCE = 1e-6
PINV_RCOND = 1e-10


class InconsistentStateError(ValueError):
    """Initial state outside the consistent subspace."""


class Trajectory(BaseModel):
    """Sampled solution: states and outputs per instant, driving values per interval."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    states: np.ndarray
    driving: np.ndarray
    outputs: np.ndarray
    max_constraint_violation: float


class TrialResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial: int
    passed: bool
    output_mismatch: float
    relation_drift: float
    constraint_violation: float
    infeasible_step: Optional[int] = None
    message: str = ""


class TrajectoryReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: list[TrialResult]
    tolerance: float = TRAJECTORY_TOLERANCE

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.trials)

    @property
    def max_output_mismatch(self) -> float:
        return max((t.output_mismatch for t in self.trials), default=0.0)

    @property
    def max_relation_drift(self) -> float:
        return max((t.relation_drift for t in self.trials), default=0.0)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per trial, reproducible whatever order trials run in."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def rk4_step_matrices(M: np.ndarray, N: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Φ, Γ with z⁺ = Φ z + Γ v for one RK4 step of z' = M z + N v with v held."""
    n = M.shape[0]
    I = np.eye(n)
    M2 = M @ M
    M3 = M2 @ M
    Phi = I + h * M + h**2 * M2 / 2 + h**3 * M3 / 6 + h**4 * (M3 @ M) / 24
    Gamma = h * (I + h * M / 2 + h**2 * M2 / 6 + h**3 * M3 / 24) @ N
    return Phi, Gamma


def _steps(horizon: float, dt: float) -> int:
    if dt <= 0 or horizon <= 0:
        raise ValueError(f"horizon and dt must be positive, got {horizon} and {dt}")
    return max(1, int(round(horizon / dt)))


def _relative(value: float, scale: float) -> float:
    return value / max(1.0, scale)


def sample_consistent_trajectory(x: ConstrainedSystem, x0, horizon: float = DEFAULT_HORIZON,
                                 dt: float = DEFAULT_DT, seed: int = 0,
                                 tol: Tolerance = DEFAULT_TOLERANCE) -> Trajectory:
    """Random trajectory of x from x0 that keeps H x = 0."""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != x.n:
        raise DimensionMismatchError(f"x0 has {x0.shape[0]} entries, the system has {x.n} states")
    V = consistent_subspace(x, tol)
    P = V.projector()
    if np.linalg.norm(x0 - P @ x0) > tol.inclusion * max(1.0, np.linalg.norm(x0)):
        raise InconsistentStateError(f"x0 = {x0.tolist()} is not in the consistent subspace")

    A, G, C, H = (x.numeric(name) for name in ("A", "G", "C", "H"))
    F = friend(x, V)
    D = admissible_directions(x, V, tol).basis
    M = A + G @ F
    Phi, Gamma = rk4_step_matrices(M, G @ D, dt)

    rng = np.random.default_rng(seed)
    steps = _steps(horizon, dt)
    states = np.zeros((steps + 1, x.n))
    driving = np.zeros((steps, x.s))
    states[0] = P @ x0
    for k in range(steps):
        v = rng.standard_normal(D.shape[1])
        driving[k] = F @ states[k] + D @ v
        states[k + 1] = P @ (Phi @ states[k] + Gamma @ v)

    violation = 0.0
    if x.q:
        residual = np.linalg.norm(states @ H.T, axis=1)
        violation = float(np.max(residual) / max(1.0, float(np.max(np.linalg.norm(states, axis=1)))))
    return Trajectory(
        times=np.arange(steps + 1) * dt,
        states=states,
        driving=driving,
        outputs=states @ C.T,
        max_constraint_violation=violation,
    )


class _PairLoop(BaseModel):
    """Closed loop of the pair (x1, x2) with d1 = F1 x1 + D1 v and d2 = K z + L d1."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    M: np.ndarray
    N: np.ndarray
    residual_M: np.ndarray
    residual_N: np.ndarray
    excitation_dim: int


def _pair_loop(x1: ConstrainedSystem, x2: ConstrainedSystem, S: Subspace,
               tol: Tolerance) -> _PairLoop:
    n1, n2 = x1.n, x2.n
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = x1.numeric("A")
    A[n1:, n1:] = x2.numeric("A")
    G1 = np.vstack([x1.numeric("G"), np.zeros((n2, x1.s))])
    G2 = np.vstack([np.zeros((n1, x2.s)), x2.numeric("G")])

    V1 = consistent_subspace(x1, tol)
    F1 = np.hstack([friend(x1, V1), np.zeros((x1.s, n2))])
    D1 = admissible_directions(x1, V1, tol).basis

    # least-squares choice of d2 that keeps the pair velocity inside S
    Q = S.complement_projector()
    gain = -np.linalg.pinv(Q @ G2, rcond=PINV_RCOND) if x2.s else np.zeros((0, n1 + n2))
    K = gain @ Q @ A
    L = gain @ Q @ G1

    M = A + G1 @ F1 + G2 @ (K + L @ F1)
    N = (G1 + G2 @ L) @ D1
    return _PairLoop(M=M, N=N, residual_M=Q @ M, residual_N=Q @ N, excitation_dim=D1.shape[1])


def _run_trial(x1: ConstrainedSystem, x2: ConstrainedSystem, S: Subspace, loop: _PairLoop,
               trial: int, horizon: float, dt: float, seed: int) -> TrialResult:
    rng = trial_rng(seed, trial)
    n1 = x1.n
    C1, C2 = x1.numeric("C"), x2.numeric("C")
    H1, H2 = x1.numeric("H"), x2.numeric("H")
    P = S.projector()
    Phi, Gamma = rk4_step_matrices(loop.M, loop.N, dt)

    steps = _steps(horizon, dt)
    z = S.basis @ rng.standard_normal(S.dim) if S.dim else np.zeros(S.ambient_dim)
    # w1 - w2 = [C1 -C2] z
    output_map = np.hstack([C1, -C2])
    output_gain = float(np.linalg.norm(output_map, 2)) if output_map.size else 0.0
    sup_mismatch = sup_drift = sup_violation = sup_state = 0.0
    for k in range(steps + 1):
        x1_k, x2_k = z[:n1], z[n1:]
        w1 = C1 @ x1_k
        sup_state = max(sup_state, float(np.linalg.norm(z)))
        sup_mismatch = max(sup_mismatch, float(np.linalg.norm(w1 - C2 @ x2_k)))
        sup_violation = max(sup_violation, float(np.linalg.norm(H1 @ x1_k)), float(np.linalg.norm(H2 @ x2_k)))
        if k == steps:
            break

        v = rng.standard_normal(loop.excitation_dim)
        infeasible = np.linalg.norm(loop.residual_M @ z + loop.residual_N @ v)
        if infeasible > TRAJECTORY_TOLERANCE * max(1.0, np.linalg.norm(z) + np.linalg.norm(v)):
            return TrialResult(
                trial=trial, passed=False,
                output_mismatch=_relative(sup_mismatch, output_gain * sup_state),
                relation_drift=_relative(sup_drift, sup_state),
                constraint_violation=_relative(sup_violation, sup_state),
                infeasible_step=k,
                message=f"no d2 keeps the pair in the relation at step {k} (residual {infeasible:.3e})",
            )
        following = Phi @ z + Gamma @ v
        sup_drift = max(sup_drift, float(np.linalg.norm(following - P @ following)))
        z = P @ following

    result = TrialResult(
        trial=trial,
        passed=True,
        output_mismatch=_relative(sup_mismatch, output_gain * sup_state),
        relation_drift=_relative(sup_drift, sup_state),
        constraint_violation=_relative(sup_violation, sup_state),
    )
    failed = [
        name for name in ("output_mismatch", "relation_drift", "constraint_violation")
        if getattr(result, name) > TRAJECTORY_TOLERANCE
    ]
    if failed:
        return result.model_copy(update={"passed": False, "message": "exceeded: " + ", ".join(failed)})
    return result


def validate_by_trajectories(x1: ConstrainedSystem, x2: ConstrainedSystem, relation: Subspace,
                             trials: int = 5, horizon: float = DEFAULT_HORIZON,
                             dt: float = DEFAULT_DT, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOLERANCE) -> TrajectoryReport:
    """Drive x1 along random consistent trajectories starting in the relation and let x2 follow.

    Figures are sup norms over the horizon, relative to max(1, ‖[C1 -C2]‖ sup |z|) for the
    output mismatch and to max(1, sup |z|) for drift and constraint violation.
    """
    if x1.w != x2.w:
        raise DimensionMismatchError(
            f"simulation needs equal output dimensions, got {x1.w} and {x2.w}"
        )
    if relation.ambient_dim != x1.n + x2.n:
        raise DimensionMismatchError(
            f"relation lives in R^{relation.ambient_dim} but the state spaces have {x1.n} + {x2.n}"
        )
    loop = _pair_loop(x1, x2, relation, tol)
    return TrajectoryReport(
        trials=[_run_trial(x1, x2, relation, loop, t, horizon, dt, seed) for t in range(trials)]
    )


def pointwise_relation_check(S: Subspace, x1: ConstrainedSystem, x2: ConstrainedSystem,
                             samples: int = 50, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Sample (x1, x2) ∈ S and admissible d1; check a matching d2 exists and outputs agree."""
    if S.ambient_dim != x1.n + x2.n:
        raise DimensionMismatchError(
            f"relation lives in R^{S.ambient_dim} but the state spaces have {x1.n} + {x2.n}"
        )
    if x1.w != x2.w:
        return False
    n1 = x1.n
    A1, G1, C1 = x1.numeric("A"), x1.numeric("G"), x1.numeric("C")
    A2, G2, C2 = x2.numeric("A"), x2.numeric("G"), x2.numeric("C")
    V1 = consistent_subspace(x1, tol)
    Q1 = V1.complement_projector()
    D1 = admissible_directions(x1, V1, tol).basis
    Q = S.complement_projector()
    G2_lift = np.vstack([np.zeros((n1, x2.s)), G2])
    rng = np.random.default_rng(seed)

    for _ in range(samples):
        z = S.basis @ rng.standard_normal(S.dim) if S.dim else np.zeros(S.ambient_dim)
        p1, p2 = z[:n1], z[n1:]
        scale = max(1.0, float(np.linalg.norm(z)))
        if np.linalg.norm(C1 @ p1 - C2 @ p2) > TRAJECTORY_TOLERANCE * scale:
            return False

        d1_particular = np.linalg.lstsq(Q1 @ G1, -Q1 @ A1 @ p1, rcond=None)[0] if x1.s else np.zeros(0)
        if np.linalg.norm(Q1 @ (A1 @ p1 + G1 @ d1_particular)) > TRAJECTORY_TOLERANCE * scale:
            return False
        d1 = d1_particular + D1 @ rng.standard_normal(D1.shape[1])

        velocity = np.concatenate([A1 @ p1 + G1 @ d1, A2 @ p2])
        if x2.s:
            d2 = np.linalg.lstsq(Q @ G2_lift, -Q @ velocity, rcond=None)[0]
            velocity = velocity + G2_lift @ d2
        if np.linalg.norm(Q @ velocity) > TRAJECTORY_TOLERANCE * max(scale, float(np.linalg.norm(d1))):
            return False
    return True

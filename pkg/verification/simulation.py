"""Consistent subspaces, largest simulation relations and relation checking.

A subspace S of X1 x X2 is a simulation relation of x1 by x2 when
  - S ⊂ V1 x V2 and C1 x1 = C2 x2 on S,
  - diag(A1, A2) S ⊂ S + im diag(G1, G2),
  - (V1 ∩ im G1) x {0} ⊂ S + {0} x im G2.
The first two items are closed under sums, so the largest subspace satisfying them is
a decreasing fixed point; the third is monotone in S and is checked once on that fixed
point. x1 is simulated by x2 when the fixed point passes the third check and projects
onto all of V1.
"""
import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import block_diag

from subspaces import subspace as sp
from subspaces.subspace import DEFAULT_TOLERANCE, Subspace, Tolerance
from systems.models import ConstrainedSystem, DimensionMismatchError


class SimulationReport(BaseModel):
    """Verdict of x1 ≼ x2 with the largest relation as witness."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    holds: bool
    relation: Subspace
    full: bool
    side_condition_ok: bool
    iterations: int
    v1_dim: int
    v2_dim: int
    relation_dim: int
    projected_dim: int
    tolerance: Tolerance

    @property
    def fullness_gap(self) -> int:
        """dim V1 - dim π1(S)."""
        return self.v1_dim - self.projected_dim


class BisimulationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    holds: bool
    forward: SimulationReport
    backward: SimulationReport


class RelationCheck(BaseModel):
    """Outcome of checking a candidate relation condition by condition."""

    model_config = ConfigDict(frozen=True)

    ok: bool
    conditions: dict[str, bool]
    diagnostics: list[str]


def _fixed_point(start: Subspace, A: np.ndarray, imG: Subspace,
                 tol: Tolerance) -> tuple[Subspace, int]:
    """Iterate S <- S ∩ A⁻¹(S + im G) from ``start`` until the dimension settles.

    The dimension drops on every step that changes S, so at most dim(start) + 1 steps run.
    """
    current = start
    iterations = 0
    while True:
        following = sp.intersect(current, sp.preimage(A, sp.sum(current, imG, tol), tol), tol)
        iterations += 1
        if following.dim == current.dim:
            return current, iterations
        current = following


def consistent_subspace(x: ConstrainedSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Largest V with A V ⊂ V + im G and V ⊂ ker H (invariant subspace algorithm)."""
    ker_h = sp.kernel(x.numeric("H"), tol)
    return _fixed_point(ker_h, x.numeric("A"), sp.image(x.numeric("G"), tol), tol)[0]


def _pair_matrices(x1: ConstrainedSystem, x2: ConstrainedSystem):
    A = block_diag(x1.numeric("A"), x2.numeric("A"))
    G = block_diag(x1.numeric("G"), x2.numeric("G"))
    return A, G


def _check_outputs(x1: ConstrainedSystem, x2: ConstrainedSystem) -> None:
    if x1.w != x2.w:
        raise DimensionMismatchError(
            f"simulation needs equal output dimensions, got {x1.w} and {x2.w}"
        )


def _side_condition(S: Subspace, x1: ConstrainedSystem, x2: ConstrainedSystem,
                    V1: Subspace, tol: Tolerance) -> bool:
    """(V1 ∩ im G1) x {0} ⊂ S + {0} x im G2."""
    moves = sp.product(sp.intersect(V1, sp.image(x1.numeric("G"), tol), tol), sp.zero(x2.n))
    matched = sp.sum(S, sp.product(sp.zero(x1.n), sp.image(x2.numeric("G"), tol)), tol)
    return sp.contains(matched, moves, tol)


def largest_simulation_relation(x1: ConstrainedSystem, x2: ConstrainedSystem,
                                tol: Tolerance = DEFAULT_TOLERANCE) -> SimulationReport:
    """Largest relation satisfying consistency, output matching and invariance, plus verdict."""
    _check_outputs(x1, x2)
    V1 = consistent_subspace(x1, tol)
    V2 = consistent_subspace(x2, tol)
    output_match = sp.kernel(np.hstack([x1.numeric("C"), -x2.numeric("C")]), tol)
    start = sp.intersect(sp.product(V1, V2), output_match, tol)

    A, G = _pair_matrices(x1, x2)
    relation, iterations = _fixed_point(start, A, sp.image(G, tol), tol)

    side_ok = _side_condition(relation, x1, x2, V1, tol)
    projected = sp.factor_project(relation, (0, x1.n), tol)
    full = sp.contains(projected, V1, tol)
    return SimulationReport(
        holds=full and side_ok,
        relation=relation,
        full=full,
        side_condition_ok=side_ok,
        iterations=iterations,
        v1_dim=V1.dim,
        v2_dim=V2.dim,
        relation_dim=relation.dim,
        projected_dim=projected.dim,
        tolerance=tol,
    )


def simulated_by(x1: ConstrainedSystem, x2: ConstrainedSystem,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> SimulationReport:
    """Decide x1 ≼ x2; ``holds`` is the verdict."""
    return largest_simulation_relation(x1, x2, tol)


def bisimilar(x1: ConstrainedSystem, x2: ConstrainedSystem,
              tol: Tolerance = DEFAULT_TOLERANCE) -> BisimulationReport:
    forward = simulated_by(x1, x2, tol)
    backward = simulated_by(x2, x1, tol)
    return BisimulationReport(holds=forward.holds and backward.holds,
                              forward=forward, backward=backward)


def check_relation(S: Subspace, x1: ConstrainedSystem, x2: ConstrainedSystem,
                   require_full: bool = False,
                   tol: Tolerance = DEFAULT_TOLERANCE) -> RelationCheck:
    """Check a candidate relation against each simulation-relation condition."""
    _check_outputs(x1, x2)
    if S.ambient_dim != x1.n + x2.n:
        raise DimensionMismatchError(
            f"relation lives in R^{S.ambient_dim} but the state spaces have {x1.n} + {x2.n}"
        )
    A, G = _pair_matrices(x1, x2)
    conditions: dict[str, bool] = {}
    diagnostics: list[str] = []

    output_match = sp.kernel(np.hstack([x1.numeric("C"), -x2.numeric("C")]), tol)
    conditions["output"] = sp.contains(output_match, S, tol)
    if not conditions["output"]:
        diagnostics.append("output rows: C1 x1 = C2 x2 fails on the relation")

    conditions["invariance"] = sp.contains(sp.sum(S, sp.image(G, tol), tol), sp.image_of(A, S, tol), tol)
    if not conditions["invariance"]:
        diagnostics.append("invariance: diag(A1, A2) S is not inside S + im diag(G1, G2)")

    pi1 = sp.factor_project(S, (0, x1.n), tol)
    pi2 = sp.factor_project(S, (x1.n, x1.n + x2.n), tol)
    V1 = consistent_subspace(x1, tol)
    conditions["consistency"] = (
        sp.contains(V1, pi1, tol) and sp.contains(consistent_subspace(x2, tol), pi2, tol)
    )
    if not conditions["consistency"]:
        diagnostics.append("consistency: a projection of the relation leaves the consistent subspace")

    conditions["side_condition"] = _side_condition(S, x1, x2, V1, tol)
    if not conditions["side_condition"]:
        diagnostics.append("side condition: some admissible move of x1 from the origin cannot be matched")

    if require_full:
        conditions["full"] = sp.contains(pi1, V1, tol)
        if not conditions["full"]:
            diagnostics.append(
                f"fullness: projection has dimension {pi1.dim} but V1 has dimension {V1.dim}"
            )

    return RelationCheck(ok=all(conditions.values()), conditions=conditions, diagnostics=diagnostics)


def admissible_directions(x: ConstrainedSystem, V: Subspace,
                          tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """{δ : G δ ∈ V}, the driving directions that never leave V."""
    return sp.preimage(x.numeric("G"), V, tol)


def friend(x: ConstrainedSystem, V: Subspace) -> np.ndarray:
    """A feedback F with (A + G F) V ⊂ V for an (A, G)-invariant V."""
    A, G = x.numeric("A"), x.numeric("G")
    if V.dim == 0 or G.shape[1] == 0:
        return np.zeros((G.shape[1], x.n))
    # A V = V K + G L  =>  F = -L Vᵀ gives (A + G F) V = V K
    solution, *_ = np.linalg.lstsq(np.hstack([V.basis, G]), A @ V.basis, rcond=None)
    L = solution[V.dim:]
    return -L @ V.basis.T

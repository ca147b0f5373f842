"""Assume-guarantee contracts reduced to simulation checks.

Each verdict is a conjunction of simulation verdicts from ``verification.simulation``;
the report keeps every sub-report and every intermediate system it built so a caller
can see which premise failed.
"""
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from subspaces import subspace as sp
from subspaces.subspace import DEFAULT_TOLERANCE, Subspace, Tolerance
from systems.interconnect import ass_meet_gar, env_meet_sys, induced_environment, series_gar, series_sigma
from systems.models import (
    ConstrainedSystem,
    Contract,
    DimensionMismatchError,
    DrivenSystem,
    GuaranteeSystem,
    require_valid,
    restrict_output_u,
    restrict_output_y,
)
from verification.simulation import SimulationReport, bisimilar, simulated_by

System = Union[ConstrainedSystem, GuaranteeSystem, DrivenSystem]


class ContractReport(BaseModel):
    """Verdict of a contract-level check with the simulation checks behind it."""

    model_config = ConfigDict(frozen=True)

    verdict: bool
    sub_reports: dict[str, SimulationReport]
    constructed_systems: dict[str, System] = {}

    def failed(self) -> list[str]:
        """Names of the sub-reports whose verdict is false."""
        return [name for name, report in self.sub_reports.items() if not report.holds]


class NotComposableError(Exception):
    """Raised by series_compose when the first contract is not series composable to the second."""

    def __init__(self, report: ContractReport):
        self.report = report
        super().__init__(
            "contracts are not series composable: " + ", ".join(report.failed())
        )


def _report(sub_reports: dict[str, SimulationReport], **constructed: System) -> ContractReport:
    return ContractReport(
        verdict=all(r.holds for r in sub_reports.values()),
        sub_reports=sub_reports,
        constructed_systems=constructed,
    )


def compatible(e: ConstrainedSystem, c: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """E is compatible with C when E ≼ A."""
    require_valid(c, "contract")
    if e.w != c.assumption.w:
        raise DimensionMismatchError(
            f"compatible: environment has {e.w} output(s) but the assumption has {c.assumption.w}"
        )
    return _report({"E≼A": simulated_by(e, c.assumption, tol)})


def implements(s: DrivenSystem, c: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """Σ implements C exactly when A⋏Σ ≼ G."""
    require_valid(c, "contract")
    if s.p != c.y_dim:
        raise DimensionMismatchError(
            f"implements: system has {s.p} output(s) but the guarantee y_dim is {c.y_dim}"
        )
    meet = env_meet_sys(c.assumption, s)
    return _report({"A⋏Σ≼G": simulated_by(meet.base, c.guarantee.base, tol)}, **{"A⋏Σ": meet})


def _check_same_ports(c1: Contract, c2: Contract, op: str) -> None:
    if (c1.u_dim, c1.y_dim) != (c2.u_dim, c2.y_dim):
        raise DimensionMismatchError(
            f"{op}: contracts have (u, y) dimensions {(c1.u_dim, c1.y_dim)} and {(c2.u_dim, c2.y_dim)}"
        )


def refines(c1: Contract, c2: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """C₁ refines C₂ when A₂ ≼ A₁ and A₂⋏G₁ ≼ G₂."""
    require_valid(c1, "first contract")
    require_valid(c2, "second contract")
    _check_same_ports(c1, c2, "refines")
    meet = ass_meet_gar(c2.assumption, c1.guarantee)
    return _report(
        {
            "A₂≼A₁": simulated_by(c2.assumption, c1.assumption, tol),
            "A₂⋏G₁≼G₂": simulated_by(meet.base, c2.guarantee.base, tol),
        },
        **{"A₂⋏G₁": meet},
    )


def consistency_report(c: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    require_valid(c, "contract")
    gu = restrict_output_u(c.guarantee)
    return _report({"A≼Gᵘ": simulated_by(c.assumption, gu, tol)}, **{"Gᵘ": gu})


def consistency_necessary(c: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """A ≼ Gᵘ, a necessary condition for the contract to have an implementation."""
    return consistency_report(c, tol).verdict


def series_composable(c1: Contract, c2: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """C₁ is series composable to C₂ when (A₁⋏G₁)ʸ ≼ A₂."""
    require_valid(c1, "first contract")
    require_valid(c2, "second contract")
    if c1.y_dim != c2.assumption.w:
        raise DimensionMismatchError(
            f"series_composable: first contract has y_dim {c1.y_dim} "
            f"but the second assumption has {c2.assumption.w} output(s)"
        )
    meet = ass_meet_gar(c1.assumption, c1.guarantee)
    meet_y = restrict_output_y(meet)
    return _report({"(A₁⋏G₁)ʸ≼A₂": simulated_by(meet_y, c2.assumption, tol)}, **{"A₁⋏G₁": meet})


def series_compose(c1: Contract, c2: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> Contract:
    """C₁→C₂ = (A₁, G₁→G₂); refuses pairs that are not series composable."""
    report = series_composable(c1, c2, tol)
    if not report.verdict:
        raise NotComposableError(report)
    return Contract(assumption=c1.assumption, guarantee=series_gar(c1.guarantee, c2.guarantee))


def saturate(c: Contract) -> Contract:
    """(A, A⋏G), which has the same implementations as (A, G)."""
    require_valid(c, "contract")
    return Contract(assumption=c.assumption, guarantee=ass_meet_gar(c.assumption, c.guarantee))


def same_environments(c1: Contract, c2: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Both contracts admit the same compatible environments when their assumptions are bisimilar."""
    if c1.assumption.w != c2.assumption.w:
        raise DimensionMismatchError(
            f"same_environments: assumptions have {c1.assumption.w} and {c2.assumption.w} output(s)"
        )
    return bisimilar(c1.assumption, c2.assumption, tol).holds


def decomposes(c: Contract, c1: Contract, c2: Contract, tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """C can be split into C₁ then C₂ designed independently: C₁ composable to C₂ and C₁→C₂ refines C."""
    composable = series_composable(c1, c2, tol)
    if not composable.verdict:
        return _report(dict(composable.sub_reports), **composable.constructed_systems)
    composed = Contract(assumption=c1.assumption, guarantee=series_gar(c1.guarantee, c2.guarantee))
    refinement = refines(composed, c, tol)
    return _report(
        {**composable.sub_reports, **refinement.sub_reports},
        **composable.constructed_systems,
        **refinement.constructed_systems,
        **{"G₁→G₂": composed.guarantee},
    )


def series_theorem_conditions(e: ConstrainedSystem, s1: DrivenSystem, s2: DrivenSystem,
                              c1: Contract, c2: Contract,
                              tol: Tolerance = DEFAULT_TOLERANCE) -> ContractReport:
    """The three conclusions of the series composition theorem for one concrete instance.

    E compatible with C₁; (E⋏Σ₁)ʸ compatible with C₂; Σ₁→Σ₂ implements C₁→C₂.
    """
    induced = induced_environment(e, s1)
    chain = series_sigma(s1, s2)
    composed = series_compose(c1, c2, tol)
    return _report(
        {
            "E≼A₁": compatible(e, c1, tol).sub_reports["E≼A"],
            "(E⋏Σ₁)ʸ≼A₂": compatible(induced, c2, tol).sub_reports["E≼A"],
            "A₁⋏(Σ₁→Σ₂)≼G₁→G₂": implements(chain, composed, tol).sub_reports["A⋏Σ≼G"],
        },
        **{"(E⋏Σ₁)ʸ": induced, "Σ₁→Σ₂": chain, "G₁→G₂": composed.guarantee},
    )


# Witness relations from the proofs. Each returns a subspace that check_relation should accept.

def environment_lift_relation(S_e: Subspace, n_e: int, n: int) -> Subspace:
    """{(x_e, x, x_a, x) : (x_e, x_a) ∈ S_e}, a relation of E⋏Σ by A⋏Σ."""
    n_a = S_e.ambient_dim - n_e
    if n_a < 0:
        raise DimensionMismatchError(
            f"environment_lift_relation: S_e lives in R^{S_e.ambient_dim}, smaller than n_e = {n_e}"
        )
    basis = np.zeros((n_e + n + n_a + n, S_e.dim + n))
    basis[:n_e, : S_e.dim] = S_e.basis[:n_e]
    basis[n_e + n : n_e + n + n_a, : S_e.dim] = S_e.basis[n_e:]
    basis[n_e : n_e + n, S_e.dim :] = np.eye(n)
    basis[n_e + n + n_a :, S_e.dim :] = np.eye(n)
    return sp.image(basis)


def saturation_relation(V_ag: Subspace, n_a: int, n_g: int) -> Subspace:
    """{(x_a, x_g, x_g) : (x_a, x_g) ∈ V_ag}, a full relation of A⋏G by G."""
    if V_ag.ambient_dim != n_a + n_g:
        raise DimensionMismatchError(
            f"saturation_relation: V_ag lives in R^{V_ag.ambient_dim}, expected {n_a + n_g}"
        )
    return sp.image(np.vstack([V_ag.basis, V_ag.basis[n_a:]]))


def series_witness_relation(S1: Subspace, R: Subspace, S2: Subspace, *,
                            n_a1: int, n1: int, n2: int, n_a2: int,
                            tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Relation of A₁⋏(Σ₁→Σ₂) by G₁→G₂ glued from the three component relations.

    S1 ⊂ (x_a1, x1, x_g1), R ⊂ (x_a1, x1, x_a2), S2 ⊂ (x_a2, x2, x_g2). The result is the
    set of (x_a1, x1, x2, x_g1, x_g2) for which some x_a2 puts all three tuples in place.
    """
    n_g1 = S1.ambient_dim - n_a1 - n1
    n_g2 = S2.ambient_dim - n_a2 - n2
    if n_g1 < 0 or n_g2 < 0 or R.ambient_dim != n_a1 + n1 + n_a2:
        raise DimensionMismatchError("series_witness_relation: relation dimensions do not fit together")

    # working coordinates (x_a1, x1, x2, x_g1, x_g2, x_a2); x_a2 is projected out at the end
    offsets = np.cumsum([0, n_a1, n1, n2, n_g1, n_g2, n_a2])
    total = int(offsets[-1])

    def positions(*blocks: int) -> list[int]:
        return [i for b in blocks for i in range(offsets[b], offsets[b + 1])]

    glued = sp.full(total)
    for S, blocks in ((S1, (0, 1, 3)), (R, (0, 1, 5)), (S2, (5, 2, 4))):
        glued = sp.intersect(glued, sp.coordinate_lift(S, positions(*blocks), total, tol), tol)
    return sp.factor_project(glued, (0, int(offsets[5])), tol)

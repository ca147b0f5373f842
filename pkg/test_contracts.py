"""
Contract operation tests: compatibility, implementation, refinement, composition
"""
import numpy as np
import pytest

from oracle.generators import random_driven_system
from systems.catalog import (
    example_assumption,
    example_contract,
    example_guarantee,
    free_derivative_system,
    free_output_contract,
    frozen_input_contract,
    frozen_system,
    hidden_state_environment,
    single_integrator_plant,
    zero_output_plant,
)
from systems.interconnect import ass_meet_gar, env_meet_sys, series_gar
from systems.models import ConstrainedSystem, Contract, DimensionMismatchError, DrivenSystem, GuaranteeSystem
from verification.contracts import (
    NotComposableError,
    compatible,
    consistency_necessary,
    decomposes,
    environment_lift_relation,
    implements,
    refines,
    same_environments,
    saturate,
    saturation_relation,
    series_compose,
    series_composable,
    series_theorem_conditions,
)
from verification.simulation import check_relation, consistent_subspace, simulated_by


def _stuck_contract():
    frozen_u = GuaranteeSystem.from_blocks(
        A=np.zeros((2, 2)), G=[[0], [1]], Cu=[[1, 0]], Cy=[[0, 1]]
    )
    return Contract(assumption=example_assumption(), guarantee=frozen_u)


def test_compatibility():
    c = example_contract()
    assert compatible(example_assumption(), c).verdict
    assert compatible(frozen_system(), c).verdict
    assert not compatible(free_derivative_system(), frozen_input_contract()).verdict


def test_integrator_implements_example():
    report = implements(single_integrator_plant(), example_contract())
    assert report.verdict
    assert report.failed() == []
    assert "A⋏Σ" in report.constructed_systems


def test_zero_output_plant_does_not_implement_example():
    report = implements(zero_output_plant(), example_contract())
    assert not report.verdict
    sub = report.sub_reports["A⋏Σ≼G"]
    assert sub.relation_dim == 1
    assert not sub.full
    assert not sub.side_condition_ok
    assert report.failed() == ["A⋏Σ≼G"]


@pytest.mark.parametrize("seed", range(5))
def test_every_plant_implements_free_output_contract(seed):
    plant = random_driven_system(seed, n=1 + seed % 3, m=1, p=1)
    assert implements(plant, free_output_contract()).verdict


def test_implements_checks_output_dimension():
    two_outputs = DrivenSystem(A=np.zeros((2, 2)), B=[[1], [0]], C=np.eye(2))
    with pytest.raises(DimensionMismatchError):
        implements(two_outputs, example_contract())


def test_refinement():
    c, f = example_contract(), free_output_contract()
    assert refines(c, c).verdict
    assert refines(c, f).verdict
    report = refines(f, c)
    assert not report.verdict
    assert report.failed() == ["A₂⋏G₁≼G₂"]


def test_refinement_needs_matching_ports():
    with pytest.raises(DimensionMismatchError):
        refines(example_contract(), free_output_contract(y_dim=2))


def test_saturation():
    c = example_contract()
    sat = saturate(c)
    assert sat.guarantee.n == 3
    assert np.array_equal(sat.guarantee.H, [[1, -1, 0]])
    assert refines(sat, c).verdict
    assert refines(c, sat).verdict
    for plant in (single_integrator_plant(), zero_output_plant()):
        assert implements(plant, sat).verdict == implements(plant, c).verdict


def test_consistency_necessary_condition():
    assert consistency_necessary(example_contract())
    assert consistency_necessary(saturate(free_output_contract()))
    assert not consistency_necessary(_stuck_contract())


def test_series_composability():
    c, f = example_contract(), free_output_contract()
    assert series_composable(c, c).verdict
    assert series_composable(c, f).verdict
    assert not series_composable(f, frozen_input_contract()).verdict


def test_series_compose_refuses_incomposable_pairs():
    with pytest.raises(NotComposableError) as excinfo:
        series_compose(free_output_contract(), frozen_input_contract())
    assert not excinfo.value.report.verdict
    assert excinfo.value.report.failed() == ["(A₁⋏G₁)ʸ≼A₂"]


def test_series_compose_matches_series_guarantee():
    c = example_contract()
    composed = series_compose(c, c)
    expected = series_gar(example_guarantee(), example_guarantee())
    assert np.array_equal(composed.guarantee.A, expected.A)
    assert np.array_equal(composed.guarantee.H, expected.H)
    assert np.array_equal(composed.assumption.A, c.assumption.A)


def test_same_environments():
    c = example_contract()
    assert same_environments(c, saturate(c))
    assert not same_environments(c, frozen_input_contract())


def test_decomposition():
    c = example_contract()
    composed = series_compose(c, c)
    assert decomposes(composed, c, c).verdict
    assert not decomposes(composed, free_output_contract(), frozen_input_contract()).verdict


def test_series_theorem_on_integrators():
    c = example_contract()
    plant = single_integrator_plant()
    report = series_theorem_conditions(example_assumption(), plant, plant, c, c)
    assert report.verdict
    assert set(report.sub_reports) == {"E≼A₁", "(E⋏Σ₁)ʸ≼A₂", "A₁⋏(Σ₁→Σ₂)≼G₁→G₂"}


def test_environment_lift_relation_is_a_full_relation():
    a = example_assumption()
    plant = single_integrator_plant()
    e = hidden_state_environment(a, extra=2, seed=3)
    S_e = simulated_by(e, a).relation
    lifted = environment_lift_relation(S_e, e.n, plant.n)
    check = check_relation(lifted, env_meet_sys(e, plant).base, env_meet_sys(a, plant).base, require_full=True)
    assert check.ok, check.diagnostics


def test_saturation_relation_is_a_full_relation():
    c = example_contract()
    meet = ass_meet_gar(c.assumption, c.guarantee)
    R = saturation_relation(consistent_subspace(meet.base), c.assumption.n, c.guarantee.n)
    assert check_relation(R, meet.base, c.guarantee.base, require_full=True).ok


def test_witness_builders_check_dimensions():
    with pytest.raises(DimensionMismatchError):
        saturation_relation(consistent_subspace(ConstrainedSystem(A=np.zeros((2, 2)))), 1, 2)

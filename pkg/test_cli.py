"""
Command-line, model file and settings tests
"""
import json
from pathlib import Path

import numpy as np
import pytest

from app.main import EXIT_DIMENSION, EXIT_FALSE, EXIT_TRUE, EXIT_USAGE, main
from app.model_file import ModelFileError, dump_model_file, load_model, parse_model_file
from app.settings import ENV_TOL_INCL, ENV_TOL_RANK, SettingsError, resolve_tolerance
from systems.catalog import example_contract, example_guarantee
from systems.interconnect import series_gar

EXAMPLE = str(Path(__file__).resolve().parent / "example.json")


@pytest.fixture(autouse=True)
def _clean_tolerance_env(monkeypatch):
    monkeypatch.delenv(ENV_TOL_RANK, raising=False)
    monkeypatch.delenv(ENV_TOL_INCL, raising=False)


def _json_run(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


# check

@pytest.mark.parametrize("argv, expected", [
    (["check", "composable", EXAMPLE, "C", "C"], EXIT_TRUE),
    (["check", "implements", EXAMPLE, "plant", "C"], EXIT_TRUE),
    (["check", "implements", EXAMPLE, "zeroPlant", "C"], EXIT_FALSE),
    (["check", "implements", EXAMPLE, "twoOutputPlant", "C"], EXIT_DIMENSION),
    (["check", "simulation", EXAMPLE, "frozen", "freeDeriv"], EXIT_TRUE),
    (["check", "simulation", EXAMPLE, "freeDeriv", "frozen"], EXIT_FALSE),
    (["check", "bisimulation", EXAMPLE, "A", "freeDeriv"], EXIT_TRUE),
    (["check", "refines", EXAMPLE, "C", "F"], EXIT_TRUE),
    (["check", "refines", EXAMPLE, "F", "C"], EXIT_FALSE),
    (["check", "compatible", EXAMPLE, "frozen", "C"], EXIT_TRUE),
    (["check", "consistency", EXAMPLE, "C"], EXIT_TRUE),
    (["check", "consistency", EXAMPLE, "Stuck"], EXIT_FALSE),
    (["check", "composable", EXAMPLE, "F", "Frozen"], EXIT_FALSE),
])
def test_check_exit_codes(argv, expected, capsys):
    assert main(argv) == expected


def test_check_json_report(capsys):
    code, report = _json_run(capsys, "check", "composable", EXAMPLE, "C", "C")
    assert code == EXIT_TRUE
    assert list(report) == ["command", "kind", "operands", "exit_code", "verdict", "checks"]
    assert report["verdict"] is True
    sub = report["checks"]["(A₁⋏G₁)ʸ≼A₂"]
    assert sub["dims"]["relation"] == 2
    assert sub["relation"]["ambient_dim"] == 4


def test_check_derived_operands(capsys):
    code, report = _json_run(capsys, "check", "simulation", EXAMPLE, "C.meet.y", "A")
    assert code == EXIT_TRUE
    assert report["fullness_gap"] == 0


def test_check_with_exact_cross_check(capsys):
    code, report = _json_run(capsys, "check", "simulation", EXAMPLE, "C.meet.y", "A", "--exact")
    assert code == EXIT_TRUE
    assert report["exact"]["relation_dim"] == report["dims"]["relation"]


def test_check_output_is_deterministic(capsys):
    main(["check", "refines", EXAMPLE, "C", "F", "--json"])
    first = capsys.readouterr().out
    main(["check", "refines", EXAMPLE, "C", "F", "--json"])
    assert capsys.readouterr().out == first


def test_usage_errors(capsys):
    assert main(["check", "implements", EXAMPLE, "C", "C"]) == EXIT_USAGE
    assert main(["check", "simulation", EXAMPLE, "A"]) == EXIT_USAGE
    assert main(["check", "simulation", EXAMPLE, "A", "nowhere"]) == EXIT_USAGE
    assert main(["check", "nonsense", EXAMPLE, "A"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE


def test_dimension_error_report(capsys):
    code, report = _json_run(capsys, "check", "implements", EXAMPLE, "twoOutputPlant", "C")
    assert code == EXIT_DIMENSION
    assert report["error"] == "dimension_mismatch"


# compose

def test_compose_writes_reloadable_contract(tmp_path, capsys):
    out = tmp_path / "composed.json"
    assert main(["compose", EXAMPLE, "C", "C", "--out", str(out)]) == EXIT_TRUE
    model = parse_model_file(out)
    composed = model.contracts["C_C"]
    expected = series_gar(example_guarantee(), example_guarantee())
    for name in ("A", "G", "Cu", "Cy", "H"):
        assert np.array_equal(getattr(composed.guarantee, name), getattr(expected, name))
    assert main(["check", "refines", str(out), "C_C", "C_C"]) == EXIT_TRUE


def test_compose_refuses_incomposable(tmp_path, capsys):
    out = tmp_path / "composed.json"
    assert main(["compose", EXAMPLE, "F", "Frozen", "--out", str(out)]) == EXIT_FALSE
    assert not out.exists()


# inspect

def test_inspect(capsys):
    code, report = _json_run(capsys, "inspect", EXAMPLE, "C.meet")
    assert code == EXIT_TRUE
    assert report["consistent_subspace"]["dim"] == 2
    code, report = _json_run(capsys, "inspect", EXAMPLE, "A", "--exact")
    assert report["exact"]["v_dim"] == 1


def test_inspect_refuses_driven_system(capsys):
    assert main(["inspect", EXAMPLE, "plant"]) == EXIT_USAGE


def test_exact_check_refuses_binary_fractions(tmp_path, capsys):
    path = tmp_path / "float.json"
    path.write_text(json.dumps({"systems": {"x": {"kind": "constrained", "A": [[0.5]], "C": [[1]]}}}))
    assert main(["inspect", str(path), "x"]) == EXIT_TRUE
    capsys.readouterr()
    code, report = _json_run(capsys, "inspect", str(path), "x", "--exact")
    assert code == EXIT_USAGE
    assert report["error"] == "non_rational"


# validate

def test_validate_holding_claim(capsys):
    code, report = _json_run(capsys, "validate", EXAMPLE, "composable", "C", "C",
                             "--trials", "3", "--horizon", "1.0")
    assert code == EXIT_TRUE
    assert report["verdict"] is True
    assert len(report["trials"]) == 3


def test_validate_false_claim_runs_no_trials(capsys):
    code, report = _json_run(capsys, "validate", EXAMPLE, "simulation", "freeDeriv", "frozen")
    assert code == EXIT_FALSE
    assert report["claim"]["side_condition_ok"] is False
    assert "trials" not in report


def test_validate_is_reproducible(capsys):
    argv = ["validate", EXAMPLE, "implements", "plant", "C", "--trials", "2", "--horizon", "0.5", "--seed", "9"]
    _, first = _json_run(capsys, *argv)
    _, second = _json_run(capsys, *argv)
    assert first == second


# model files

def test_model_file_locations():
    with pytest.raises(ModelFileError) as excinfo:
        load_model({"systems": {"A": {"kind": "constrained", "A": [[0]]}},
                    "contracts": {"X": {"assumption": "A", "guarantee": "missing"}}})
    assert excinfo.value.location == "contracts.X.guarantee"

    with pytest.raises(ModelFileError) as excinfo:
        load_model({"systems": {"bad": {"kind": "driven", "A": [[0]], "B": [[1], [2, 3]]}}})
    assert excinfo.value.location == "systems.bad.B"

    with pytest.raises(ModelFileError) as excinfo:
        load_model({"systems": {"bad": {"kind": "driven", "A": [[0]], "B": [[1], [2]]}}})
    assert excinfo.value.location == "systems.bad.B"

    with pytest.raises(ModelFileError):
        load_model({"systems": {"x": {"kind": "constrained", "A": [[0]], "Q": [[1]]}}})


def test_boolean_entries_are_rejected():
    with pytest.raises(ModelFileError) as excinfo:
        load_model({"systems": {"bad": {"kind": "constrained", "A": [[True]]}}})
    assert excinfo.value.location == "systems.bad.A"
    model = load_model({"systems": {"x": {"kind": "constrained", "A": [[1, 0.5], ["1/2", 0]]}}})
    assert model.systems["x"].A.shape == (2, 2)


def test_unreadable_model_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    assert main(["inspect", str(path), "x"]) == EXIT_USAGE
    assert main(["inspect", str(tmp_path / "absent.json"), "x"]) == EXIT_USAGE


def test_dump_keeps_fractions(tmp_path):
    model = load_model({"systems": {"x": {"kind": "constrained", "A": [["1/2"]], "C": [[1]]}}})
    path = tmp_path / "out.json"
    dump_model_file(path, model.systems)
    assert json.loads(path.read_text())["systems"]["x"]["A"] == [["1/2"]]
    c = example_contract()
    dump_model_file(path, {"a": c.assumption, "g": c.guarantee}, {"c": ("a", "g")})
    assert parse_model_file(path).contracts["c"].y_dim == 1


# settings

def test_tolerance_precedence(monkeypatch):
    assert resolve_tolerance().rank_rel == 1e-10
    assert resolve_tolerance(file_values={"rank_rel": 1e-11}).rank_rel == 1e-11
    monkeypatch.setenv(ENV_TOL_RANK, "1e-9")
    assert resolve_tolerance(file_values={"rank_rel": 1e-11}).rank_rel == 1e-9
    assert resolve_tolerance(rank_rel=1e-12, file_values={"rank_rel": 1e-11}).rank_rel == 1e-12


def test_bad_tolerance_settings(monkeypatch, capsys):
    with pytest.raises(SettingsError):
        resolve_tolerance(inclusion=2.0)
    monkeypatch.setenv(ENV_TOL_INCL, "tight")
    with pytest.raises(SettingsError):
        resolve_tolerance()
    assert main(["check", "consistency", EXAMPLE, "C"]) == EXIT_USAGE

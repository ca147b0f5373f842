"""JSON reports with a fixed field order.

Floats are written by ``json.dumps``, i.e. the shortest repr that round-trips, so the
same inputs always give byte-identical output.
"""
import json
from typing import Optional

import numpy as np

from oracle.exact import ExactDims
from oracle.trajectories import TrajectoryReport
from subspaces.subspace import Subspace, Tolerance
from verification.contracts import ContractReport
from verification.simulation import BisimulationReport, SimulationReport


def _matrix(M: np.ndarray) -> list[list[float]]:
    # + 0.0 turns -0.0 into 0.0
    return [[float(v) + 0.0 for v in row] for row in np.asarray(M, dtype=float)]


def tolerance_dict(tol: Tolerance) -> dict:
    return {"rank_rel": tol.rank_rel, "inclusion": tol.inclusion}


def subspace_dict(V: Subspace) -> dict:
    """Basis row-major, one row per ambient coordinate."""
    return {"ambient_dim": V.ambient_dim, "dim": V.dim, "basis": _matrix(V.basis)}


def simulation_dict(report: SimulationReport) -> dict:
    return {
        "verdict": report.holds,
        "full": report.full,
        "side_condition_ok": report.side_condition_ok,
        "iterations": report.iterations,
        "dims": {
            "v1": report.v1_dim,
            "v2": report.v2_dim,
            "relation": report.relation_dim,
            "projected": report.projected_dim,
        },
        "fullness_gap": report.fullness_gap,
        "relation": subspace_dict(report.relation),
        "tolerance": tolerance_dict(report.tolerance),
    }


def bisimulation_dict(report: BisimulationReport) -> dict:
    return {
        "verdict": report.holds,
        "forward": simulation_dict(report.forward),
        "backward": simulation_dict(report.backward),
    }


def contract_dict(report: ContractReport) -> dict:
    return {
        "verdict": report.verdict,
        "checks": {name: simulation_dict(sub) for name, sub in report.sub_reports.items()},
    }


def exact_dict(dims: ExactDims) -> dict:
    return dims.model_dump()


def trajectory_dict(report: TrajectoryReport) -> dict:
    return {
        "verdict": report.passed,
        "tolerance": report.tolerance,
        "max_output_mismatch": report.max_output_mismatch,
        "max_relation_drift": report.max_relation_drift,
        "trials": [trial.model_dump() for trial in report.trials],
    }


def envelope(command: str, kind: Optional[str], operands: list[str], body: dict,
             exit_code: int) -> dict:
    return {"command": command, "kind": kind, "operands": operands, "exit_code": exit_code, **body}


def error_dict(command: str, exit_code: int, error: str, message: str,
               location: str = "") -> dict:
    return {
        "command": command,
        "exit_code": exit_code,
        "error": error,
        "message": message,
        "location": location,
    }


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False)

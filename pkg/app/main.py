"""Command-line front end.

    simcontract check KIND FILE OPERAND...      decide a simulation or contract claim
    simcontract compose FILE C1 C2 --out PATH   write C1→C2 to a new model file
    simcontract inspect FILE SYSTEM             consistent subspace of a system
    simcontract validate FILE KIND OPERAND...   confirm a claim on random trajectories

Exit codes: 0 claim holds, 1 claim fails (or not composable, or a trial fails),
2 usage or model-file error, 3 dimension mismatch.
"""
import argparse
import sys
from typing import Callable, Optional

from app.model_file import ModelFile, ModelFileError, dump_model_file, parse_model_file
from app.reports import (
    bisimulation_dict,
    contract_dict,
    dumps,
    envelope,
    error_dict,
    exact_dict,
    simulation_dict,
    subspace_dict,
    tolerance_dict,
    trajectory_dict,
)
from app.settings import SettingsError, resolve_tolerance
from oracle.exact import NonRationalError, exact_subspace_dims
from oracle.trajectories import DEFAULT_DT, DEFAULT_HORIZON, validate_by_trajectories
from subspaces.matrix import DimensionMismatchError
from subspaces.subspace import Subspace, Tolerance
from systems.interconnect import ass_meet_gar
from systems.models import (
    ConstrainedSystem,
    Contract,
    DrivenSystem,
    GuaranteeSystem,
    restrict_output_u,
    restrict_output_y,
)
from verification.contracts import (
    NotComposableError,
    compatible,
    consistency_report,
    implements,
    refines,
    series_compose,
    series_composable,
)
from verification.simulation import SimulationReport, bisimilar, consistent_subspace, simulated_by

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_DIMENSION = 3

CHECK_KINDS = {
    "simulation": ("system", "system"),
    "bisimulation": ("system", "system"),
    "implements": ("plant", "contract"),
    "refines": ("contract", "contract"),
    "compatible": ("environment", "contract"),
    "composable": ("contract", "contract"),
    "consistency": ("contract",),
}
# kinds that reduce to a single simulation claim, and so can be validated on trajectories
VALIDATE_KINDS = ("simulation", "implements", "compatible", "composable", "consistency")


class UsageError(ValueError):
    """Wrong operand count or operand kind."""


class Console:
    """Status lines go to stdout, or to stderr when stdout carries the JSON report."""

    def __init__(self, json_mode: bool):
        self.json_mode = json_mode

    def status(self, line: str = "") -> None:
        print(line, file=sys.stderr if self.json_mode else sys.stdout)

    def report(self, document: dict) -> None:
        if self.json_mode:
            print(dumps(document))


# Operand resolution

def _constrained(item, ref: str) -> ConstrainedSystem:
    if isinstance(item, GuaranteeSystem):
        return item.base
    if isinstance(item, ConstrainedSystem):
        return item
    raise UsageError(f"{ref!r} is a {type(item).__name__}; expected a constrained or guarantee system")


def _driven(item, ref: str) -> DrivenSystem:
    if not isinstance(item, DrivenSystem):
        raise UsageError(f"{ref!r} is a {type(item).__name__}; expected a driven system")
    return item


def _contract(item, ref: str) -> Contract:
    if not isinstance(item, Contract):
        raise UsageError(f"{ref!r} is a {type(item).__name__}; expected a contract")
    return item


def _resolve_operands(model: ModelFile, kind: str, operands: list[str]):
    roles = CHECK_KINDS[kind]
    if len(operands) != len(roles):
        raise UsageError(f"{kind} takes {len(roles)} operand(s) ({', '.join(roles)}), got {len(operands)}")
    resolved = []
    for role, ref in zip(roles, operands):
        item = model.resolve(ref)
        if role in ("system", "environment"):
            resolved.append(_constrained(item, ref))
        elif role == "plant":
            resolved.append(_driven(item, ref))
        else:
            resolved.append(_contract(item, ref))
    return resolved


def _simulation_claim(kind: str, operands: list, tol: Tolerance):
    """(x1, x2, report) for a kind that reduces to one simulation x1 ≼ x2."""
    if kind == "simulation":
        x1, x2 = operands
    elif kind == "implements":
        plant, c = operands
        meet = implements(plant, c, tol).constructed_systems["A⋏Σ"]
        x1, x2 = meet.base, c.guarantee.base
    elif kind == "compatible":
        x1, x2 = operands[0], operands[1].assumption
        compatible(x1, operands[1], tol)
    elif kind == "composable":
        c1, c2 = operands
        series_composable(c1, c2, tol)
        x1, x2 = restrict_output_y(ass_meet_gar(c1.assumption, c1.guarantee)), c2.assumption
    elif kind == "consistency":
        (c,) = operands
        x1, x2 = c.assumption, restrict_output_u(c.guarantee)
    else:
        raise UsageError(f"{kind} claims cannot be validated on trajectories; use one of {', '.join(VALIDATE_KINDS)}")
    return x1, x2, simulated_by(x1, x2, tol)


# Human-readable summaries

def _mark(ok: bool) -> str:
    return "✅" if ok else "❌"


def _print_basis(console: Console, V: Subspace) -> None:
    for row in V.basis:
        console.status("      [" + ", ".join(f"{v: .6g}" for v in row) + "]")


def _print_simulation(console: Console, name: str, report: SimulationReport, witness: bool) -> None:
    console.status(f"   {_mark(report.holds)} {name}")
    console.status(
        f"      dim V1 = {report.v1_dim}, dim V2 = {report.v2_dim}, "
        f"relation dim = {report.relation_dim}, iterations = {report.iterations}"
    )
    console.status(
        f"      full: {report.full} (gap {report.fullness_gap}), "
        f"side condition: {'ok' if report.side_condition_ok else 'fails'}"
    )
    if witness:
        console.status("      relation basis:")
        _print_basis(console, report.relation)


# Commands

def cmd_check(args, console: Console) -> int:
    model = parse_model_file(args.file)
    tol = resolve_tolerance(args.tol_rank, args.tol_incl, model.tolerance)
    operands = _resolve_operands(model, args.kind, args.operands)

    if args.kind == "simulation":
        report = simulated_by(*operands, tol)
        verdict, body, parts = report.holds, simulation_dict(report), {"x1≼x2": report}
        if args.exact:
            body["exact"] = exact_dict(exact_subspace_dims(*operands))
    elif args.kind == "bisimulation":
        report = bisimilar(*operands, tol)
        verdict, body = report.holds, bisimulation_dict(report)
        parts = {"x1≼x2": report.forward, "x2≼x1": report.backward}
    else:
        checks: dict[str, Callable] = {
            "implements": implements,
            "refines": refines,
            "compatible": compatible,
            "composable": series_composable,
            "consistency": consistency_report,
        }
        report = checks[args.kind](*operands, tol)
        verdict, body, parts = report.verdict, contract_dict(report), report.sub_reports

    console.status(f"{_mark(verdict)} {args.kind} {' '.join(args.operands)}: "
                   f"{'holds' if verdict else 'does not hold'}")
    for name, sub in parts.items():
        _print_simulation(console, name, sub, args.witness)
    code = EXIT_TRUE if verdict else EXIT_FALSE
    console.report(envelope("check", args.kind, args.operands, body, code))
    return code


def cmd_compose(args, console: Console) -> int:
    model = parse_model_file(args.file)
    tol = resolve_tolerance(args.tol_rank, args.tol_incl, model.tolerance)
    c1 = _contract(model.resolve(args.c1), args.c1)
    c2 = _contract(model.resolve(args.c2), args.c2)
    name = args.name or f"{args.c1}_{args.c2}".replace(".", "_")

    try:
        composed = series_compose(c1, c2, tol)
    except NotComposableError as e:
        console.status(f"❌ {args.c1} is not series composable to {args.c2}")
        for sub_name, sub in e.report.sub_reports.items():
            _print_simulation(console, sub_name, sub, args.witness)
        console.report(envelope("compose", None, [args.c1, args.c2], contract_dict(e.report), EXIT_FALSE))
        return EXIT_FALSE

    assumption_name, guarantee_name = f"{name}_assumption", f"{name}_guarantee"
    dump_model_file(
        args.out,
        {assumption_name: composed.assumption, guarantee_name: composed.guarantee},
        {name: (assumption_name, guarantee_name)},
    )
    console.status(f"✅ {args.c1}→{args.c2} written to {args.out} as contract {name!r}")
    console.status(
        f"   guarantee: {composed.guarantee.n} states, u_dim {composed.u_dim}, "
        f"y_dim {composed.y_dim}, {composed.guarantee.base.q} constraint row(s)"
    )
    console.report(envelope("compose", None, [args.c1, args.c2], {
        "verdict": True,
        "contract": name,
        "out": str(args.out),
        "guarantee_states": composed.guarantee.n,
    }, EXIT_TRUE))
    return EXIT_TRUE


def cmd_inspect(args, console: Console) -> int:
    model = parse_model_file(args.file)
    tol = resolve_tolerance(args.tol_rank, args.tol_incl, model.tolerance)
    x = _constrained(model.resolve(args.system), args.system)
    V = consistent_subspace(x, tol)

    console.status(f"📐 {args.system}: n = {x.n}, outputs = {x.w}, constraints = {x.q}, driving = {x.s}")
    console.status(f"   consistent subspace: dim {V.dim}")
    _print_basis(console, V)
    body = {"system": args.system, "n": x.n, "consistent_subspace": subspace_dict(V),
            "tolerance": tolerance_dict(tol)}
    if args.exact:
        exact = exact_subspace_dims(x)
        console.status(f"   exact dimension: {exact.v_dim}"
                       f" {_mark(exact.v_dim == V.dim)}")
        body["exact"] = exact_dict(exact)
    console.report(envelope("inspect", None, [args.system], body, EXIT_TRUE))
    return EXIT_TRUE


def cmd_validate(args, console: Console) -> int:
    if args.kind not in VALIDATE_KINDS:
        raise UsageError(f"{args.kind} claims cannot be validated on trajectories; "
                         f"use one of {', '.join(VALIDATE_KINDS)}")
    model = parse_model_file(args.file)
    tol = resolve_tolerance(args.tol_rank, args.tol_incl, model.tolerance)
    operands = _resolve_operands(model, args.kind, args.operands)
    x1, x2, report = _simulation_claim(args.kind, operands, tol)

    if not report.holds:
        console.status(f"❌ {args.kind} {' '.join(args.operands)} does not hold; no trials run")
        console.report(envelope("validate", args.kind, args.operands,
                                {"verdict": False, "claim": simulation_dict(report)}, EXIT_FALSE))
        return EXIT_FALSE

    console.status(f"🔄 {args.trials} trial(s), horizon {args.horizon}, dt {args.dt}, seed {args.seed}")
    trajectories = validate_by_trajectories(
        x1, x2, report.relation, trials=args.trials, horizon=args.horizon, dt=args.dt,
        seed=args.seed, tol=tol,
    )
    for trial in trajectories.trials:
        if not trial.passed:
            console.status(f"   ❌ trial {trial.trial}: {trial.message}")
    console.status(
        f"{_mark(trajectories.passed)} max output mismatch {trajectories.max_output_mismatch:.3e}, "
        f"max relation drift {trajectories.max_relation_drift:.3e}"
    )
    code = EXIT_TRUE if trajectories.passed else EXIT_FALSE
    console.report(envelope("validate", args.kind, args.operands, trajectory_dict(trajectories), code))
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    common.add_argument("--tol-rank", type=float, default=None, help="relative rank cutoff")
    common.add_argument("--tol-incl", type=float, default=None, help="inclusion tolerance")
    common.add_argument("--witness", action="store_true", help="print relation bases")
    common.add_argument("--exact", action="store_true", help="cross-check with exact rational arithmetic")

    parser = argparse.ArgumentParser(
        prog="simcontract",
        description="Simulation and assume-guarantee contract checks for linear systems",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="decide a claim")
    check.add_argument("kind", choices=sorted(CHECK_KINDS))
    check.add_argument("file")
    check.add_argument("operands", nargs="+")
    check.set_defaults(handler=cmd_check)

    compose = commands.add_parser("compose", parents=[common], help="series-compose two contracts")
    compose.add_argument("file")
    compose.add_argument("c1")
    compose.add_argument("c2")
    compose.add_argument("--out", required=True, help="model file to write")
    compose.add_argument("--name", default=None, help="name of the composed contract")
    compose.set_defaults(handler=cmd_compose)

    inspect = commands.add_parser("inspect", parents=[common], help="show the consistent subspace")
    inspect.add_argument("file")
    inspect.add_argument("system")
    inspect.set_defaults(handler=cmd_inspect)

    validate = commands.add_parser("validate", parents=[common], help="confirm a claim on trajectories")
    validate.add_argument("file")
    validate.add_argument("kind", choices=VALIDATE_KINDS)
    validate.add_argument("operands", nargs="+")
    validate.add_argument("--trials", type=int, default=50)
    validate.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    validate.add_argument("--dt", type=float, default=DEFAULT_DT)
    validate.add_argument("--seed", type=int, default=0)
    validate.set_defaults(handler=cmd_validate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_TRUE

    console = Console(args.json)
    try:
        return args.handler(args, console)
    except DimensionMismatchError as e:
        code, error, location = EXIT_DIMENSION, "dimension_mismatch", ""
        message = str(e)
    except ModelFileError as e:
        code, error, location = EXIT_USAGE, "model_file", e.location
        message = str(e)
    except NonRationalError as e:
        code, error, location = EXIT_USAGE, "non_rational", ""
        message = f"{e}; exact checks need integer or \"p/q\" entries"
    except (UsageError, SettingsError, ValueError) as e:
        code, error, location = EXIT_USAGE, "usage", ""
        message = str(e)
    console.status(f"❌ {message}")
    console.report(error_dict(args.command, code, error, message, location))
    return code


if __name__ == "__main__":
    sys.exit(main())

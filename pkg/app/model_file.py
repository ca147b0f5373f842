"""Model files: one JSON document naming systems and contracts.

{
  "tolerance": {"rank_rel": 1e-10, "inclusion": 1e-8},          (optional)
  "systems": {
    "A":     {"kind": "constrained", "A": [[0]], "G": [[1]], "C": [[1]]},
    "G":     {"kind": "guarantee", "A": ..., "G": ..., "Cu": ..., "Cy": ..., "H": ...},
    "plant": {"kind": "driven", "A": ..., "B": ..., "C": ..., "G": ...}
  },
  "contracts": {"C": {"assumption": "A", "guarantee": "G"}}
}

Entries are numbers or exact "p/q" strings. Omitted matrices are empty.
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, ValidationError

from subspaces.matrix import DimensionMismatchError, as_matrix
from systems.interconnect import ass_meet_gar
from systems.models import (
    ConstrainedSystem,
    Contract,
    DrivenSystem,
    GuaranteeSystem,
    restrict_output_u,
    restrict_output_y,
    validate,
)

Entry = Union[StrictInt, StrictFloat, str]
MatrixRows = list[list[Entry]]
System = Union[DrivenSystem, ConstrainedSystem, GuaranteeSystem]


class ModelFileError(ValueError):
    """Problem in a model file, with a dotted location such as ``systems.plant.B``."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


# Document schema

class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DrivenEntry(_Schema):
    kind: Literal["driven"]
    A: MatrixRows
    B: Optional[MatrixRows] = None
    C: Optional[MatrixRows] = None
    G: Optional[MatrixRows] = None


class ConstrainedEntry(_Schema):
    kind: Literal["constrained"]
    A: MatrixRows
    G: Optional[MatrixRows] = None
    C: Optional[MatrixRows] = None
    H: Optional[MatrixRows] = None


class GuaranteeEntry(_Schema):
    kind: Literal["guarantee"]
    A: MatrixRows
    G: Optional[MatrixRows] = None
    Cu: Optional[MatrixRows] = None
    Cy: Optional[MatrixRows] = None
    H: Optional[MatrixRows] = None


class ContractEntry(_Schema):
    assumption: str
    guarantee: str


class ToleranceEntry(_Schema):
    rank_rel: Optional[float] = None
    inclusion: Optional[float] = None


SystemEntry = Annotated[
    Union[DrivenEntry, ConstrainedEntry, GuaranteeEntry], Field(discriminator="kind")
]


class ModelDocument(_Schema):
    tolerance: Optional[ToleranceEntry] = None
    systems: dict[str, SystemEntry] = Field(default_factory=dict)
    contracts: dict[str, ContractEntry] = Field(default_factory=dict)


# Parsed model set

class ModelFile(BaseModel):
    """Named, validated systems and contracts, plus any tolerance overrides from the file."""

    model_config = ConfigDict(frozen=True)

    tolerance: dict[str, float] = {}
    systems: dict[str, System] = {}
    contracts: dict[str, Contract] = {}

    def resolve(self, ref: str) -> Union[System, Contract]:
        """Look up NAME, optionally followed by .assumption/.guarantee/.meet and .u/.y."""
        name, *suffixes = ref.split(".")
        if name in self.systems:
            item = self.systems[name]
        elif name in self.contracts:
            item = self.contracts[name]
        else:
            known = sorted(self.systems) + sorted(self.contracts)
            raise ModelFileError(f"unknown name {name!r}; known: {', '.join(known)}", ref)
        for suffix in suffixes:
            item = _derive(item, suffix, ref)
        return item


def _derive(item, suffix: str, ref: str):
    if isinstance(item, Contract):
        if suffix == "assumption":
            return item.assumption
        if suffix == "guarantee":
            return item.guarantee
        if suffix == "meet":
            return ass_meet_gar(item.assumption, item.guarantee)
    if isinstance(item, GuaranteeSystem):
        if suffix == "u":
            return restrict_output_u(item)
        if suffix == "y":
            return restrict_output_y(item)
    raise ModelFileError(f"{type(item).__name__} has no derived system {suffix!r}", ref)


def _location(loc: tuple) -> str:
    parts = [str(part) for part in loc]
    if parts[:1] == ["systems"] and len(parts) > 2:
        # drop the kind tag pydantic inserts and stop at the matrix name
        parts = parts[:2] + parts[3:4]
    return ".".join(parts)


def _build_system(entry, where: str) -> System:
    matrices = entry.model_dump(exclude={"kind"}, exclude_none=True)
    for name, rows in matrices.items():
        try:
            as_matrix(rows)
        except ValueError as e:
            raise ModelFileError(str(e), f"{where}.{name}") from e
    try:
        if entry.kind == "driven":
            system = DrivenSystem(**matrices)
        elif entry.kind == "constrained":
            system = ConstrainedSystem(**matrices)
        else:
            system = GuaranteeSystem.from_blocks(
                matrices["A"], matrices.get("G"), matrices.get("Cu", []),
                matrices.get("Cy", []), matrices.get("H"),
            )
    except ValidationError as e:
        error = e.errors()[0]
        raise ModelFileError(error["msg"].removeprefix("Value error, "), where) from e
    except (ValueError, DimensionMismatchError) as e:
        raise ModelFileError(str(e), where) from e
    issues = validate(system)
    if issues:
        issue = issues[0]
        subject = issue.subject.split(".")[-1]
        raise ModelFileError(issue.message, f"{where}.{subject}")
    return system


def load_model(document: dict) -> ModelFile:
    """Build and cross-reference a model set from an already decoded JSON document."""
    try:
        parsed = ModelDocument.model_validate(document)
    except ValidationError as e:
        error = e.errors()[0]
        raise ModelFileError(error["msg"], _location(error["loc"])) from e

    systems = {name: _build_system(entry, f"systems.{name}") for name, entry in parsed.systems.items()}

    contracts = {}
    for name, entry in parsed.contracts.items():
        where = f"contracts.{name}"
        if name in systems:
            raise ModelFileError("name is used by a system too", where)
        for role, expected in (("assumption", ConstrainedSystem), ("guarantee", GuaranteeSystem)):
            ref = getattr(entry, role)
            if ref not in systems:
                raise ModelFileError(f"unresolved reference {ref!r}", f"{where}.{role}")
            if not isinstance(systems[ref], expected):
                raise ModelFileError(
                    f"{ref!r} is a {type(systems[ref]).__name__}, expected {expected.__name__}",
                    f"{where}.{role}",
                )
        contract = Contract(assumption=systems[entry.assumption], guarantee=systems[entry.guarantee])
        issues = validate(contract)
        if issues:
            raise ModelFileError(str(issues[-1]), where)
        contracts[name] = contract

    tolerance = parsed.tolerance.model_dump(exclude_none=True) if parsed.tolerance else {}
    return ModelFile(tolerance=tolerance, systems=systems, contracts=contracts)


def parse_model_file(path: Union[str, Path]) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(f"cannot read file: {e.strerror}", str(path)) from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(e.msg, f"line {e.lineno} column {e.colno}") from e
    if not isinstance(document, dict):
        raise ModelFileError("top level must be an object")
    return load_model(document)


# Writing

def _entry(value) -> Entry:
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    value = float(value)
    return int(value) if value.is_integer() else value


def _rows(M: np.ndarray) -> MatrixRows:
    return [[_entry(v) for v in row] for row in M.tolist()]


def system_entry(system: System) -> dict:
    if isinstance(system, GuaranteeSystem):
        return {
            "kind": "guarantee",
            "A": _rows(system.A), "G": _rows(system.G),
            "Cu": _rows(system.Cu), "Cy": _rows(system.Cy), "H": _rows(system.H),
        }
    kind = "driven" if isinstance(system, DrivenSystem) else "constrained"
    return {"kind": kind, **{name: _rows(M) for name, M in system.matrices().items()}}


def dump_model_file(path: Union[str, Path], systems: dict[str, System],
                    contracts: Optional[dict[str, tuple[str, str]]] = None,
                    tolerance: Optional[dict[str, float]] = None) -> None:
    """Write a model file; contracts map a name to (assumption name, guarantee name)."""
    document: dict = {}
    if tolerance:
        document["tolerance"] = dict(tolerance)
    document["systems"] = {name: system_entry(s) for name, s in systems.items()}
    document["contracts"] = {
        name: {"assumption": a, "guarantee": g} for name, (a, g) in (contracts or {}).items()
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")

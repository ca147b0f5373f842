"""Typed system descriptions, contracts and their validation.

DrivenSystem      x' = A x + B u + G d,  y = C x
ConstrainedSystem x' = A x + G d,        w = C x,  0 = H x
GuaranteeSystem   a ConstrainedSystem whose output rows are split into u rows then y rows
Contract          (assumption, guarantee) with matching u dimensions
"""
from typing import ClassVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from subspaces.matrix import DimensionMismatchError, as_matrix, block
from systems.base_system import BaseSystem

__all__ = [
    "Contract",
    "ConstrainedSystem",
    "DimensionMismatchError",
    "DrivenSystem",
    "GuaranteeSystem",
    "ValidationIssue",
    "require_valid",
    "restrict_output_rows",
    "restrict_output_u",
    "restrict_output_y",
    "validate",
]


class DrivenSystem(BaseSystem):
    """Open LTI system with input u, output y and driving variable d."""

    empty_shapes: ClassVar = {"B": ("n", 0), "C": (0, "n"), "G": ("n", 0)}

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    G: np.ndarray

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def expected_shapes(self) -> dict[str, tuple[int, int]]:
        n = self.n
        return {"A": (n, n), "B": (n, self.m), "C": (self.p, n), "G": (n, self.s)}


class ConstrainedSystem(BaseSystem):
    """Autonomous driven system with an algebraic constraint 0 = H x."""

    empty_shapes: ClassVar = {"G": ("n", 0), "C": (0, "n"), "H": (0, "n")}

    A: np.ndarray
    G: np.ndarray
    C: np.ndarray
    H: np.ndarray

    @property
    def w(self) -> int:
        """Output dimension."""
        return self.C.shape[0]

    @property
    def q(self) -> int:
        """Number of constraint rows."""
        return self.H.shape[0]

    def expected_shapes(self) -> dict[str, tuple[int, int]]:
        n = self.n
        return {"A": (n, n), "G": (n, self.s), "C": (self.w, n), "H": (self.q, n)}


class GuaranteeSystem(BaseModel):
    """Constrained system whose outputs are ordered [u; y]."""

    model_config = ConfigDict(frozen=True)

    base: ConstrainedSystem
    u_dim: int
    y_dim: int

    @classmethod
    def from_blocks(cls, A, G, Cu, Cy, H=None) -> "GuaranteeSystem":
        A = as_matrix(A)
        n = A.shape[0]
        Cu = as_matrix(Cu, shape=(0, n))
        Cy = as_matrix(Cy, shape=(0, n))
        C = block([[Cu], [Cy]])
        base = ConstrainedSystem(A=A, G=G, C=C, H=H)
        return cls(base=base, u_dim=Cu.shape[0], y_dim=Cy.shape[0])

    @property
    def A(self) -> np.ndarray:
        return self.base.A

    @property
    def G(self) -> np.ndarray:
        return self.base.G

    @property
    def H(self) -> np.ndarray:
        return self.base.H

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def s(self) -> int:
        return self.base.s

    @property
    def Cu(self) -> np.ndarray:
        return as_matrix(self.base.C[: self.u_dim], shape=(0, self.n))

    @property
    def Cy(self) -> np.ndarray:
        return as_matrix(self.base.C[self.u_dim : self.u_dim + self.y_dim], shape=(0, self.n))


class Contract(BaseModel):
    """Assume-guarantee pair."""

    model_config = ConfigDict(frozen=True)

    assumption: ConstrainedSystem
    guarantee: GuaranteeSystem

    @property
    def u_dim(self) -> int:
        return self.guarantee.u_dim

    @property
    def y_dim(self) -> int:
        return self.guarantee.y_dim


class ValidationIssue(BaseModel):
    """One violated dimension invariant."""

    model_config = ConfigDict(frozen=True)

    subject: str
    message: str
    expected: tuple[int, int] | None = None
    actual: tuple[int, int] | None = None

    def __str__(self) -> str:
        return f"{self.subject}: {self.message}"


def _prefixed(issues: list[ValidationIssue], prefix: str) -> list[ValidationIssue]:
    return [
        issue.model_copy(update={"subject": f"{prefix}.{issue.subject}"}) for issue in issues
    ]


def _validate_system(system: BaseSystem) -> list[ValidationIssue]:
    issues = []
    if system.A.shape[0] != system.A.shape[1]:
        issues.append(ValidationIssue(
            subject="A",
            message=f"A must be square, got shape {system.A.shape}",
            expected=(system.n, system.n),
            actual=system.A.shape,
        ))
    for name, expected in system.expected_shapes().items():
        if name == "A":
            continue
        actual = getattr(system, name).shape
        if actual != expected:
            issues.append(ValidationIssue(
                subject=name,
                message=f"{name} has shape {actual}, expected {expected}",
                expected=expected,
                actual=actual,
            ))
    return issues


def _validate_guarantee(g: GuaranteeSystem) -> list[ValidationIssue]:
    issues = _validate_system(g.base)
    if g.u_dim < 0 or g.y_dim < 0:
        issues.append(ValidationIssue(
            subject="partition",
            message=f"u_dim and y_dim must be non-negative, got {g.u_dim} and {g.y_dim}",
        ))
    elif g.u_dim + g.y_dim != g.base.w:
        issues.append(ValidationIssue(
            subject="partition",
            message=(
                f"u_dim + y_dim = {g.u_dim + g.y_dim} does not match the "
                f"{g.base.w} output rows of C"
            ),
        ))
    return issues


Validatable = Union[DrivenSystem, ConstrainedSystem, GuaranteeSystem, Contract]


def validate(item: Validatable) -> list[ValidationIssue]:
    """Check every dimension invariant; an empty list means ok. Never raises."""
    if isinstance(item, Contract):
        issues = _prefixed(_validate_system(item.assumption), "assumption")
        issues += _prefixed(_validate_guarantee(item.guarantee), "guarantee")
        if item.assumption.w != item.guarantee.u_dim:
            issues.append(ValidationIssue(
                subject="contract",
                message=(
                    f"u-dimension mismatch: assumption has {item.assumption.w} output(s) "
                    f"but guarantee u_dim is {item.guarantee.u_dim}"
                ),
            ))
        return issues
    if isinstance(item, GuaranteeSystem):
        return _validate_guarantee(item)
    return _validate_system(item)


def require_valid(item: Validatable, what: str = "system") -> Validatable:
    issues = validate(item)
    if issues:
        raise DimensionMismatchError(f"invalid {what}: " + "; ".join(str(i) for i in issues))
    return item


def restrict_output_rows(x: ConstrainedSystem, rows: slice) -> ConstrainedSystem:
    """Same system with only the selected output rows."""
    C = as_matrix(x.C[rows], shape=(0, x.n))
    return ConstrainedSystem(A=x.A, G=x.G, C=C, H=x.H)


def restrict_output_u(g: GuaranteeSystem) -> ConstrainedSystem:
    """The guarantee with only u considered as an output."""
    return restrict_output_rows(g.base, slice(0, g.u_dim))


def restrict_output_y(g: GuaranteeSystem) -> ConstrainedSystem:
    """The guarantee with only y considered as an output."""
    return restrict_output_rows(g.base, slice(g.u_dim, g.u_dim + g.y_dim))

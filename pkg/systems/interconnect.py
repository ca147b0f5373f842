"""Block-matrix builders for the four interconnections.

Every builder checks the port dimensions first, returns a fresh system and revalidates
it. Fraction entries survive when the operands carry them.
"""
from subspaces.matrix import DimensionMismatchError, block, matmul, negate, zeros
from systems.models import (
    ConstrainedSystem,
    DrivenSystem,
    GuaranteeSystem,
    require_valid,
    restrict_output_y,
)


def _block_diag(X, Y):
    return block([[X, zeros(X.shape[0], Y.shape[1])], [zeros(Y.shape[0], X.shape[1]), Y]])


def env_meet_sys(e: ConstrainedSystem, s: DrivenSystem) -> GuaranteeSystem:
    """E⋏Σ: the environment output drives the system input.

    State (x_e, x); outputs u = C_e x_e then y = C x; constraint H_e x_e = 0.
    """
    require_valid(e, "environment")
    require_valid(s, "system")
    if e.w != s.m:
        raise DimensionMismatchError(
            f"env_meet_sys: environment has {e.w} output(s) but the system has {s.m} input(s)"
        )
    A = block([[e.A, zeros(e.n, s.n)], [matmul(s.B, e.C), s.A]])
    G = _block_diag(e.G, s.G)
    Cu = block([[e.C, zeros(e.w, s.n)]])
    Cy = block([[zeros(s.p, e.n), s.C]])
    H = block([[e.H, zeros(e.q, s.n)]])
    return require_valid(GuaranteeSystem.from_blocks(A, G, Cu, Cy, H), "E⋏Σ")


def ass_meet_gar(a: ConstrainedSystem, g: GuaranteeSystem) -> GuaranteeSystem:
    """A⋏G: the guarantee with its u output equated to the assumption output.

    State (x_a, x_g); outputs u = C_a x_a then y = C^y_g x_g; constraint rows
    [H_a 0; 0 H_g; C_a -C^u_g].
    """
    require_valid(a, "assumption")
    require_valid(g, "guarantee")
    if a.w != g.u_dim:
        raise DimensionMismatchError(
            f"ass_meet_gar: assumption has {a.w} output(s) but guarantee u_dim is {g.u_dim}"
        )
    A = _block_diag(a.A, g.A)
    G = _block_diag(a.G, g.G)
    Cu = block([[a.C, zeros(a.w, g.n)]])
    Cy = block([[zeros(g.y_dim, a.n), g.Cy]])
    H = block([
        [a.H, zeros(a.q, g.n)],
        [zeros(g.base.q, a.n), g.H],
        [a.C, negate(g.Cu)],
    ])
    return require_valid(GuaranteeSystem.from_blocks(A, G, Cu, Cy, H), "A⋏G")


def series_sigma(s1: DrivenSystem, s2: DrivenSystem) -> DrivenSystem:
    """Σ₁→Σ₂: the output of s1 is the input of s2."""
    require_valid(s1, "first system")
    require_valid(s2, "second system")
    if s1.p != s2.m:
        raise DimensionMismatchError(
            f"series_sigma: first system has {s1.p} output(s) but the second has {s2.m} input(s)"
        )
    A = block([[s1.A, zeros(s1.n, s2.n)], [matmul(s2.B, s1.C), s2.A]])
    B = block([[s1.B], [zeros(s2.n, s1.m)]])
    C = block([[zeros(s2.p, s1.n), s2.C]])
    G = _block_diag(s1.G, s2.G)
    return require_valid(DrivenSystem(A=A, B=B, C=C, G=G), "Σ₁→Σ₂")


def series_gar(g1: GuaranteeSystem, g2: GuaranteeSystem) -> GuaranteeSystem:
    """G₁→G₂: y of g1 equated to u of g2.

    Outputs u = C^u_1 x_1 then y = C^y_2 x_2; constraint rows
    [H_1 0; 0 H_2; C^y_1 -C^u_2].
    """
    require_valid(g1, "first guarantee")
    require_valid(g2, "second guarantee")
    if g1.y_dim != g2.u_dim:
        raise DimensionMismatchError(
            f"series_gar: first guarantee has y_dim {g1.y_dim} but the second has u_dim {g2.u_dim}"
        )
    A = _block_diag(g1.A, g2.A)
    G = _block_diag(g1.G, g2.G)
    Cu = block([[g1.Cu, zeros(g1.u_dim, g2.n)]])
    Cy = block([[zeros(g2.y_dim, g1.n), g2.Cy]])
    H = block([
        [g1.H, zeros(g1.base.q, g2.n)],
        [zeros(g2.base.q, g1.n), g2.H],
        [g1.Cy, negate(g2.Cu)],
    ])
    return require_valid(GuaranteeSystem.from_blocks(A, G, Cu, Cy, H), "G₁→G₂")


def induced_environment(e: ConstrainedSystem, s1: DrivenSystem) -> ConstrainedSystem:
    """(E⋏Σ₁)ʸ, the environment seen by the second system of a series interconnection."""
    return restrict_output_y(env_meet_sys(e, s1))

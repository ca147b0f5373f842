#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Reproduce the integrator series example end to end and print each step.

The contract C = (A, G) leaves u free and guarantees y' = u. C is series composable to
itself and C→C guarantees y'' = u.
"""
import sys
import time
from pathlib import Path

# Set UTF-8 encoding for Windows console
if sys.platform == 'win32':
    import io
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np  # noqa: E402

from oracle.trajectories import validate_by_trajectories  # noqa: E402
from subspaces import subspace as sp  # noqa: E402
from systems.catalog import double_integrator_guarantee, example_contract, single_integrator_plant  # noqa: E402
from systems.interconnect import ass_meet_gar, series_sigma  # noqa: E402
from systems.models import restrict_output_y  # noqa: E402
from verification.contracts import implements, series_compose, series_composable  # noqa: E402
from verification.simulation import bisimilar, consistent_subspace  # noqa: E402


def step(ok: bool, message: str) -> bool:
    print(f"{'✅' if ok else '❌'} {message}")
    return ok


def main():
    print("=" * 80)
    print("Integrator contract: series composition")
    print("=" * 80)
    print()
    started = time.perf_counter()
    c = example_contract()
    results = []

    meet = ass_meet_gar(c.assumption, c.guarantee)
    V = consistent_subspace(meet.base)
    results.append(step(V.dim == 2, f"A⋏G has a {V.dim}-dimensional consistent subspace (x_a = x_g1)"))

    composable = series_composable(c, c)
    report = composable.sub_reports["(A₁⋏G₁)ʸ≼A₂"]
    results.append(step(composable.verdict, f"C is series composable to C (relation dim {report.relation_dim})"))

    # (x_a, x_g1, x_g2, x_a') with x_a = x_g1 and x_a' = x_g2
    expected = sp.span([[1, 1, 0, 0], [0, 0, 1, 1]], 4)
    results.append(step(sp.contains(report.relation, expected), "largest relation contains the hand-built relation"))

    composed = series_compose(c, c)
    print()
    print("G→G:")
    for name, M in (("A", composed.guarantee.A), ("G", composed.guarantee.G),
                    ("Cu", composed.guarantee.Cu), ("Cy", composed.guarantee.Cy),
                    ("H", composed.guarantee.H)):
        print(f"   {name} = {np.asarray(M, dtype=float).astype(int).tolist()}")
    print()

    results.append(step(bisimilar(composed.guarantee.base, double_integrator_guarantee().base).holds,
                        "G→G is bisimilar to the double integrator y'' = u"))

    chain = series_sigma(single_integrator_plant(), single_integrator_plant())
    results.append(step(implements(chain, composed).verdict, "Σ→Σ (two integrators) implements C→C"))

    trajectories = validate_by_trajectories(
        restrict_output_y(meet), c.assumption, report.relation, trials=10, horizon=5.0, dt=1e-3, seed=0
    )
    results.append(step(
        trajectories.passed,
        f"10 random trajectories agree (max output mismatch {trajectories.max_output_mismatch:.2e})",
    ))

    print()
    print("=" * 80)
    print(f"{sum(results)}/{len(results)} checks passed in {time.perf_counter() - started:.2f}s")
    print("=" * 80)
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())

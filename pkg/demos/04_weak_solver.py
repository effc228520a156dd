r"""Nonlocal operator on a grid with a nonlinear weak-solution flow.

Assembles the exact fractional Laplacian and a randomly perturbed kernel
with the same two-sided bounds, evolves the time-fractional equation with
an implicit scheme and reports the L2 decay slope and the L1 norm, which
can only decrease.
"""

from __future__ import annotations

from fracflow import gridsolver, norms, spectral
from fracflow.kernels import FracParams

p = FracParams(0.5, 1.0, 1)
grid = spectral.SpectralGrid(1, 256, 64.0)
u0 = spectral.Field.gaussian(grid, 1.0)
for spec in (
    gridsolver.KernelSpec.fractional_laplacian(1, p.beta),
    gridsolver.KernelSpec.perturbed(1, p.beta, 0.5, seed=1),
):
    op = gridsolver.assemble_operator(spec, grid)
    states = gridsolver.evolve(p, op, u0, dt=0.5, n_steps=400)
    l2 = norms.NormSeries([s.time for s in states[1:]], [norms.lp_norm(s, 2.0) for s in states[1:]], 2.0)
    fit = norms.fit_rate(l2, (10.0, 200.0))
    l1 = gridsolver.l1_series(states)
    print(f"{spec.name:>22}: L2 slope {fit.slope:+.3f}  L1 {l1.values[0]:.4f} -> {l1.values[-1]:.4f}")

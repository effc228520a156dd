r"""Periodic spectral solver on a large box.

Solves the homogeneous problem from a narrow Gaussian, compares it with the
kernel :math:`Z`, then adds a decaying source and checks the time residual
of the computed solution.
"""

from __future__ import annotations

import numpy as np

from fracflow import kernels, spectral
from fracflow.kernels import FracParams
from fracflow.norms import lp_norm

p = FracParams(0.6, 1.5, 1)
grid = spectral.SpectralGrid(1, 8192, 400.0)
u0 = spectral.Field.gaussian(grid, 0.2)
times = [1.0, 4.0, 16.0]
sols = spectral.solve_homogeneous(p, u0, times)
x = grid.mesh()[0]
mask = (np.abs(x) > 1.0) & (np.abs(x) < 10.0)
for u in sols:
    z = kernels.z_kernel(p, u.time, np.abs(x[mask]))
    print(
        f"t = {u.time:5.1f}  mass = {u.values.sum() * grid.cell_volume:.12f}  "
        f"L2 = {lp_norm(u, 2.0):.5e}  max|u - Z| away from 0 = {np.max(np.abs(u.values[mask] - z)):.2e}"
    )

# forcing with L1 norm decaying like (1 + t)^-2
ts = np.expm1(np.linspace(0.0, np.log1p(16.0), 200))
fields = np.array([u0.values / (1.0 + s) ** 2 for s in ts])
forcing = spectral.ForcingSchedule(grid, ts, fields, gamma=2.0)
forced = spectral.solve_forced(p, u0, forcing, times)
for u in forced:
    print(f"forced t = {u.time:5.1f}  L1 = {lp_norm(u, 1.0):.5e}")

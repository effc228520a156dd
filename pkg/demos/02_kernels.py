r"""Fundamental solutions as Fox H-functions.

Evaluates :math:`Z` and :math:`Y` in a subdiffusive case,
checks the classical Gaussian limit and the mass of :math:`Z`, and prints
the power tails predicted by the asymptotic envelopes.
"""

from __future__ import annotations

import numpy as np

from fracflow import foxh, kernels
from fracflow.kernels import FracParams

# Gaussian limit: alpha = 1, beta = 2
p = FracParams(1.0, 2.0, 1)
r = np.array([0.0, 0.5, 1.0, 2.0])
gauss = np.exp(-(r**2) / 4.0) / np.sqrt(4.0 * np.pi)
print("heat kernel error:", np.max(np.abs(kernels.z_kernel(p, 1.0, r) - gauss)))

# subdiffusion with a Levy-type operator
p = FracParams(0.5, 1.5, 1)
r = np.geomspace(0.1, 100.0, 7)
z = kernels.z_kernel(p, 1.0, r)
y = kernels.y_kernel(p, 1.0, r)
for ri, zi, yi in zip(r, z, y):
    env = kernels.asymptotic_envelope("Z", p, 1.0, ri)
    print(f"r = {ri:8.3f}  Z = {zi:.6e}  Y = {yi:.6e}  envelope[{env.regime.value}] = {env.envelope:.3e}")

print("mass of Z(1, .):", kernels.kernel_mass(p))
print("Lp thresholds:", kernels.kappa_thresholds(p))

# the same machinery evaluates any Fox H-function, e.g. E_{1/2}(-z)
spec = foxh.mittag_leffler_spec(0.5, 1.0)
print("H-function form of E_1/2(-1):", foxh.evaluate(spec, 1.0))

r"""Mittag-Leffler function: closed forms, slow algebraic decay and the
Gruenwald-Letnikov fractional calculus helpers.

For :math:`0 < \alpha < 1` the relaxation :math:`E_\alpha(-t^\alpha)` decays
only like :math:`t^{-\alpha}/\Gamma(1-\alpha)`, which is the source of the
slow algebraic decay rates explored in the later demos.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma

from fracflow.special import SampledSignal, caputo_derivative, mittag_leffler

# closed forms
z = np.linspace(-3.0, 2.0, 6)
print("E_{1,1}(z) - exp(z):", np.max(np.abs(mittag_leffler(1.0, 1.0, z) - np.exp(z))))
x = np.linspace(0.0, 8.0, 5)
print("E_{2,1}(-x^2) - cos(x):", np.max(np.abs(mittag_leffler(2.0, 1.0, -x**2) - np.cos(x))))

# algebraic tail of the relaxation function
alpha = 0.5
t = np.array([1e1, 1e2, 1e3, 1e4])
relax = mittag_leffler(alpha, 1.0, -(t**alpha))
tail = t**-alpha / gamma(1.0 - alpha)
for ti, r, a in zip(t, relax, tail):
    print(f"t = {ti:8.0f}   E = {r:.6e}   leading tail = {a:.6e}")

# the relaxation function solves D^alpha u = -u with u(0) = 1
n, T = 4000, 4.0
tt = np.linspace(0.0, T, n + 1)
u = mittag_leffler(alpha, 1.0, -(tt**alpha))
du = caputo_derivative(SampledSignal(u, T / n), alpha)
err = np.max(np.abs(du.values[n // 2 :] + u[n // 2 :]))
print(f"Caputo residual on [{T / 2}, {T}] with {n} steps: {err:.2e}")

"""Fundamental solutions, solvers and decay experiments for the fully
nonlocal diffusion equation

.. math::

    \\partial_t^\\alpha (u - u_0) + (-\\Delta)^{\\beta/2} u = f.

Modules:

* :mod:`fracflow.special`: Mittag-Leffler functions and fractional calculus
  on sampled signals.
* :mod:`fracflow.foxh`: Fox H-function evaluation.
* :mod:`fracflow.kernels`: the kernels :math:`Z` and :math:`Y`, their
  derivatives, masses and asymptotic envelopes.
* :mod:`fracflow.spectral`: periodic Fourier solver for the homogeneous and
  forced problems.
* :mod:`fracflow.gridsolver`: direct time stepping with general kernels and
  the fractional comparison equation.
* :mod:`fracflow.norms` and :mod:`fracflow.experiments`: norms, rate fits
  and the decay experiments.
"""

from __future__ import annotations

from fracflow.errors import FracFlowError, NumericalFailure
from fracflow.kernels import FracParams, KernelKind
from fracflow.special import mittag_leffler

__version__ = "0.1.0"

__all__ = ["FracFlowError", "FracParams", "KernelKind", "NumericalFailure", "mittag_leffler"]

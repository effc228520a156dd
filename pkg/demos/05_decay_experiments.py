r"""Decay-rate experiments: fitted log-log slopes against predicted exponents.

Runs a short version of each experiment and prints the one-line summary.
``fracflow experiment all`` runs the full acceptance matrix.
"""

from __future__ import annotations

from fracflow import experiments as ex
from fracflow.kernels import FracParams

reports = [
    ex.experiment_optimal_l2(FracParams(0.8, 2.0, 1)),
    ex.experiment_optimal_l2(FracParams(0.5, 0.5, 1)),
    ex.experiment_kink(alpha=0.5, d=1, ratios=(0.8, 2.5)),
    ex.experiment_convergence_to_Z(FracParams(0.5, 1.5, 1)),
    ex.experiment_forced(FracParams(0.5, 1.5, 1), gamma=2.0),
    ex.experiment_weak_decay(
        FracParams(0.5, 1.0, 1), N=256, L=64.0, n_steps=400, window=(10.0, 200.0)
    ),
]
for rep in reports:
    print(rep.summary())

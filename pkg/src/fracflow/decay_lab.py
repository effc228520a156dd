"""Norms, rate fits and decay experiments: the public names of :mod:`fracflow.norms`, :mod:`fracflow.experiments`."""

from __future__ import annotations

from fracflow.norms import (  # noqa: F401
    NormSeries,
    RateFit,
    fit_rate,
    gagliardo_seminorm,
    lp_norm,
    weak_lp_quasinorm,
)
from fracflow.experiments import (  # noqa: F401
    ExperimentReport,
    comparison_ode_exponent,
    decay_grid,
    experiment_convergence_to_Z,
    experiment_forced,
    experiment_kink,
    experiment_optimal_l2,
    experiment_weak_decay,
    predicted_forced_exponent,
    predicted_l2_exponent,
)

__all__ = [
    "NormSeries",
    "RateFit",
    "fit_rate",
    "gagliardo_seminorm",
    "lp_norm",
    "weak_lp_quasinorm",
    "ExperimentReport",
    "comparison_ode_exponent",
    "decay_grid",
    "experiment_convergence_to_Z",
    "experiment_forced",
    "experiment_kink",
    "experiment_optimal_l2",
    "experiment_weak_decay",
    "predicted_forced_exponent",
    "predicted_l2_exponent",
]

"""Fourier-space mild-solution solver: the public names of :mod:`fracflow.spectral`."""

from __future__ import annotations

from fracflow.spectral import (  # noqa: F401
    Field,
    ForcingSchedule,
    RadialProfile,
    SpectralGrid,
    absolute_moment,
    check_grid,
    ml_decay,
    moments,
    propagate,
    radial_profile_from_hat,
    residual,
    solve_forced,
    solve_homogeneous,
    tail_mass_radius,
)

__all__ = [
    "Field",
    "ForcingSchedule",
    "RadialProfile",
    "SpectralGrid",
    "absolute_moment",
    "check_grid",
    "ml_decay",
    "moments",
    "propagate",
    "radial_profile_from_hat",
    "residual",
    "solve_forced",
    "solve_homogeneous",
    "tail_mass_radius",
]

"""Grid weak-solution solver for general kernels: the public names of :mod:`fracflow.gridsolver`."""

from __future__ import annotations

from fracflow.gridsolver import (  # noqa: F401
    EnergyCheck,
    KernelSpec,
    MemoryState,
    NonlocalOperator,
    assemble_operator,
    energy_series,
    evolve,
    fractional_laplacian_constant,
    l1_series,
    solve_comparison_ode,
)

__all__ = [
    "EnergyCheck",
    "KernelSpec",
    "MemoryState",
    "NonlocalOperator",
    "assemble_operator",
    "energy_series",
    "evolve",
    "fractional_laplacian_constant",
    "l1_series",
    "solve_comparison_ode",
]

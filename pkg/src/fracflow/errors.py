"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FracFlowError(Exception):
    """Base class for all numerical failures raised by :mod:`fracflow`."""


class NumericalFailure(FracFlowError):
    """A tolerance or convergence target was not met (CLI exit code 1)."""


class PoleAtNonpositiveInteger(FracFlowError, ValueError):
    """Gamma was requested exactly at one of its poles."""


class NoConvergence(NumericalFailure):
    pass


class PoleHit(FracFlowError, ValueError):
    """A Mellin kernel was evaluated on top of a numerator pole."""


class OutOfConvergenceRegion(NumericalFailure):
    pass


class AsymptoticUnreliable(NumericalFailure):
    pass


class SingularAtOrigin(FracFlowError, ValueError):
    """The kernel is unbounded at ``r = 0`` for the requested parameters."""


class GridTooCoarse(NumericalFailure):
    pass


class QuadratureUnderResolved(NumericalFailure):
    pass


class KernelBoundViolation(FracFlowError, ValueError):
    pass


class LinearSolveFailure(NumericalFailure):
    pass


class RootFindFailure(NumericalFailure):
    pass


class DegenerateWindow(FracFlowError, ValueError):
    pass

"""Fox H-function engine: the public names of :mod:`fracflow.foxh`."""

from __future__ import annotations

from fracflow.foxh import (  # noqa: F401
    EvalPolicy,
    FoxHSpec,
    Pole,
    PoleSet,
    enumerate_poles,
    eval,
    eval_contour,
    eval_large,
    eval_small,
    eval_small_inverted,
    evaluate,
    h_coefficients,
    mellin_kernel,
    mittag_leffler_spec,
)

__all__ = [
    "EvalPolicy",
    "FoxHSpec",
    "Pole",
    "PoleSet",
    "enumerate_poles",
    "eval",
    "eval_contour",
    "eval_large",
    "eval_small",
    "eval_small_inverted",
    "evaluate",
    "h_coefficients",
    "mellin_kernel",
    "mittag_leffler_spec",
]

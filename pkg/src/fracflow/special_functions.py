"""Mittag-Leffler function, log-gamma and Gruenwald-Letnikov calculus: the public names of :mod:`fracflow.special`."""

from __future__ import annotations

from fracflow.special import (  # noqa: F401
    MLKind,
    SampledSignal,
    ToleranceConfig,
    caputo_derivative,
    gl_weights,
    log_abs_gamma,
    log_gamma,
    mittag_leffler,
    ml_envelope,
    rgamma,
    rl_derivative,
    rl_integral,
)

__all__ = [
    "MLKind",
    "SampledSignal",
    "ToleranceConfig",
    "caputo_derivative",
    "gl_weights",
    "log_abs_gamma",
    "log_gamma",
    "mittag_leffler",
    "ml_envelope",
    "rgamma",
    "rl_derivative",
    "rl_integral",
]

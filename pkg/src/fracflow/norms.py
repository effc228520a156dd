"""Strong and weak Lebesgue norms, Gagliardo seminorms and power-law fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracflow.errors import DegenerateWindow

WEAK_LADDER_LEVELS = 64


# {{{ series


@dataclass(frozen=True)
class NormSeries:
    """Values of a (quasi)norm of a solution at increasing times."""

    times: np.ndarray
    values: np.ndarray
    p: float
    weak: bool = False

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1d arrays of equal length")
        if np.any(values < 0):
            raise ValueError("norm values must be nonnegative")
        if not 1 <= self.p <= math.inf:
            raise ValueError(f"p must be in [1, inf]: {self.p}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of :math:`\\log v = \\text{slope} \\log t + \\text{intercept}`."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    npoints: int


def fit_rate(series: NormSeries, window: tuple[float, float] = (10.0, 1.0e3)) -> RateFit:
    """Fit a power law to the part of *series* inside *window*.

    :raises DegenerateWindow: if fewer than 6 points fall inside the window
        or some of them are not positive.
    """
    t0, t1 = window
    if not 0 < t0 < t1:
        raise DegenerateWindow(f"invalid window {window}")
    mask = (series.times >= t0 * (1 - 1e-12)) & (series.times <= t1 * (1 + 1e-12))
    t, v = series.times[mask], series.values[mask]
    if t.size < 6:
        raise DegenerateWindow(f"only {t.size} points in window {window}, need 6")
    if np.any(v <= 0):
        raise DegenerateWindow("nonpositive values in the fitting window")

    x, y = np.log(t), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else min(1.0, max(0.0, 1 - ss_res / ss_tot))
    return RateFit(float(slope), float(intercept), r2, (float(t[0]), float(t[-1])), int(t.size))


# }}}


# {{{ norms


def lp_norm(field, p: float) -> float:
    """Grid quadrature of :math:`\\|u\\|_{L^p}`; ``p = inf`` is the max norm."""
    if not 1 <= p <= math.inf:
        raise ValueError(f"p must be in [1, inf]: {p}")
    u = np.abs(field.values)
    if p == math.inf:
        return float(np.max(u))
    vol = field.grid.cell_volume
    if p == 1:
        return float(np.sum(u) * vol)
    if p == 2:
        return float(math.sqrt(np.sum(u * u) * vol))
    # scale out the maximum to avoid overflow
    top = float(np.max(u))
    if top == 0:
        return 0.0
    return top * float(np.sum((u / top) ** p) * vol) ** (1 / p)


def weak_lp_quasinorm(field, p: float, levels: int = WEAK_LADDER_LEVELS) -> float:
    r""":math:`\sup_\lambda \lambda \, |\{|u| > \lambda\}|^{1/p}` over a geometric
    ladder of *levels* values of :math:`\lambda` spanning the smallest
    positive and the largest :math:`|u|`."""
    if not 1 < p < math.inf:
        raise ValueError(f"p must be in (1, inf): {p}")
    u = np.sort(np.abs(field.values).ravel())
    positive = u[u > 0]
    if positive.size == 0:
        return 0.0

    lam = np.geomspace(positive[0], positive[-1], levels)
    # lambda just below each sample value catches the plateaus exactly
    lam = np.concatenate([lam, positive * (1 - 1e-12)])
    count = u.size - np.searchsorted(u, lam, side="right")
    measure = count * field.grid.cell_volume
    return float(np.max(lam * measure ** (1 / p)))


# }}}


# {{{ Gagliardo seminorm


@lru_cache(maxsize=16)
def _riesz_operator(grid, beta: float):
    from fracflow.gridsolver import KernelSpec, assemble_operator

    return assemble_operator(KernelSpec.riesz(grid.d, beta), grid)


def _seminorm_w1(field, s: float) -> float:
    from fracflow.gridsolver import _far_field, _points

    grid = field.grid
    d, h, vol = grid.d, grid.h, grid.cell_volume
    v = field.values.ravel()
    pts = _points(grid)

    total = 0.0
    for i in range(v.size):
        dist = np.linalg.norm(pts[i + 1 :] - pts[i], axis=1)
        total += 2 * np.sum(np.abs(v[i + 1 :] - v[i]) * dist ** (-d - s))
    total *= vol * vol

    # pairs with one point outside the box, where v = 0
    total += float(np.sum(np.abs(v) * _far_field(grid, s, 1.0, pts))) * vol

    # self cell: |grad v| int_{|y| < rho} |y . e| |y|^{-d-s} dy
    rho = h / 2 if d == 1 else h / math.sqrt(math.pi)
    angular = 2.0 if d == 1 else 4.0
    grads = np.gradient(field.values, h) if d > 1 else [np.gradient(field.values, h)]
    gnorm = np.sqrt(sum(g**2 for g in grads)).ravel()
    total += float(np.sum(gnorm)) * vol * angular * rho ** (1 - s) / (1 - s)
    return total


def gagliardo_seminorm(field, s: float, p: int = 2) -> float:
    r""":math:`[u]_{W^{s,p}} = \left(\iint |u(x) - u(y)|^p |x - y|^{-d-sp}
    \, dx\, dy\right)^{1/p}` with *u* extended by zero outside the grid.

    For ``p = 2`` this is the quadratic form of the grid operator with
    kernel :math:`|x - y|^{-d-2s}`, including its self-cell correction; for
    ``p = 1`` the self cell contributes the first-order term.
    """
    if not 0 < s < 1:
        raise ValueError(f"s must be in (0, 1): {s}")
    if p == 2:
        op = _riesz_operator(field.grid, 2 * s)
        return math.sqrt(max(op.quadratic_form(field.values), 0.0))
    if p == 1:
        return _seminorm_w1(field, s)
    raise ValueError(f"p must be 1 or 2: {p}")


# }}}

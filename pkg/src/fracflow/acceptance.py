r"""The acceptance matrix: oracle, identity and decay-rate checks with their
tolerances and time budgets.

Each ``criterion_*`` function returns a :class:`CriterionResult`; the
matrix is run by :func:`run_acceptance` (and ``fracflow experiment all``).
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from fracflow import experiments, foxh, kernels, spectral
from fracflow.kernels import FracParams, KernelKind
from fracflow.special import SampledSignal, mittag_leffler, rl_derivative

SEED = 20240607


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: float
    threshold: float
    seconds: float
    budget: float | None = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = "" if self.budget is None else f" / budget {self.budget:g}s"
        return (
            f"[{status}] {self.number:2d} {self.name}: measured {self.measured:.4g} "
            f"vs threshold {self.threshold:.4g} ({self.seconds:.2f}s{budget})"
        )


def _timed(number: int, name: str, threshold: float, budget: float | None, upper: bool = True):
    """Decorator: the wrapped function returns ``(measured, details)`` and
    passes when *measured* is at most (or, with ``upper=False``, at least)
    *threshold* within *budget* seconds."""

    def wrap(func: Callable[[], tuple[float, dict]]) -> Callable[[], CriterionResult]:
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            measured, details = func()
            seconds = time.perf_counter() - t0
            ok = measured <= threshold if upper else measured >= threshold
            ok = ok and details.get("ok", True)
            if budget is not None:
                ok = ok and seconds <= budget
            return CriterionResult(
                number, name, bool(ok), float(measured), threshold, seconds, budget, details
            )

        run.__name__ = func.__name__
        run.__doc__ = func.__doc__
        return run

    return wrap


# {{{ oracles


@_timed(1, "Mittag-Leffler oracles", 1.0e-10, 1.0)
def criterion_ml():
    """:math:`E_{1,1}(z) = e^z`, :math:`E_{2,1}(-z^2) = \\cos z` and
    :math:`E_{\\alpha,1}(0) = 1`."""
    z = np.linspace(-10.0, 5.0, 20)
    err_exp = np.max(np.abs(mittag_leffler(1.0, 1.0, z) / np.exp(z) - 1))
    x = np.linspace(0.0, 10.0, 20)
    err_cos = np.max(np.abs(mittag_leffler(2.0, 1.0, -(x**2)) - np.cos(x)))
    at_zero = [float(mittag_leffler(a, 1.0, 0.0)) for a in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5)]
    exact = all(v == 1.0 for v in at_zero)
    return max(err_exp, err_cos), {"exp": err_exp, "cos": err_cos, "ok": exact}


def _pairs(rng, n: int):
    t = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    r = rng.uniform(0.0, 5.0, n) * np.sqrt(t)
    r[:3] = 0.0
    return t, r


@_timed(2, "Gaussian and Cauchy kernels", 1.0e-6, 10.0)
def criterion_kernels():
    rng = np.random.default_rng(SEED)
    worst = {}
    for d in (1, 2):
        t, r = _pairs(rng, 50)
        gauss = (4 * np.pi * t) ** (-d / 2) * np.exp(-(r**2) / (4 * t))
        z = kernels.z_kernel(FracParams(1.0, 2.0, d), t, r)
        worst[f"gaussian_d{d}"] = float(np.max(np.abs(z / gauss - 1)))

        t, r = _pairs(rng, 50)
        c = math.gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)
        cauchy = c * t / (t**2 + r**2) ** ((d + 1) / 2)
        z = kernels.z_kernel(FracParams(1.0, 1.0, d), t, r)
        worst[f"cauchy_d{d}"] = float(np.max(np.abs(z / cauchy - 1)))
    return max(worst.values()), worst


@_timed(3, "kernel mass", 1.0e-3, 120.0)
def criterion_mass():
    worst, rows = 0.0, []
    for a in (0.3, 0.5, 0.8, 1.0):
        for b in (0.6, 1.0, 1.5, 2.0):
            for d in (1, 2):
                m = kernels.kernel_mass(FracParams(a, b, d))
                worst = max(worst, abs(m - 1))
                rows.append((a, b, d, m))
    return worst, {"rows": rows}


@_timed(4, "Z-Y link", 1.0e-2, 30.0)
def criterion_zy_link():
    r""":math:`Y = \partial_t^{1-\alpha} Z` with Grünwald-Letnikov weights on
    2000 steps over :math:`[0, 2]`, compared at :math:`t = 1, 2`."""
    n, T = 2000, 2.0
    dt = T / n
    tt = dt * np.arange(n + 1)
    worst = 0.0
    for a in (0.3, 0.6):
        for b, d, r in [(2.0, 1, 0.5), (2.0, 1, 1.0), (1.5, 1, 1.0), (1.0, 2, 1.0), (1.5, 2, 0.7)]:
            p = FracParams(a, b, d)
            z = np.zeros(n + 1)
            z[1:] = kernels.z_kernel(p, tt[1:], r)
            frac = rl_derivative(SampledSignal(z, dt, 0.0), 1 - a).values
            idx = [n // 2, n]
            y = kernels.y_kernel(p, tt[idx], r)
            worst = max(worst, float(np.max(np.abs(frac[idx] / y - 1))))
    return worst, {}


@_timed(5, "Fox identities", 1.0e-8, None)
def criterion_fox():
    """Reflection :math:`H(1/z)` and shift :math:`z H(z)` on the Z and Y
    parameter sets; vanishing expansion coefficients at infinity."""
    z = np.logspace(-3, 3, 20)
    worst = 0.0
    h0_zero = True
    for a, b, d in [(0.5, 1.0, 1), (0.8, 1.5, 2), (0.3, 0.6, 1), (1.0, 2.0, 3)]:
        p = FracParams(a, b, d)
        for spec in (kernels.z_spec(p), kernels.y_spec(p)):
            v = foxh.eval(spec, z)
            vs = foxh.eval(spec.swapped(), 1 / z)
            vh = foxh.eval(spec.shifted(), z)
            # values below the double range compare as absolute zeros
            worst = max(
                worst,
                float(np.max(np.abs(v - vs) / np.maximum(np.abs(v), 1e-300))),
                float(np.max(np.abs(z * v - vh) / np.maximum(np.abs(vh), 1e-300))),
            )
            h0_zero = h0_zero and foxh.h_coefficients(spec, 0)[0] == 0.0

    all_zero = all(
        np.all(foxh.h_coefficients(kernels.z_spec(FracParams(a, 2.0, d)), 12) == 0)
        for a in (0.3, 0.5, 0.8) for d in (1, 2, 3)
    )
    return worst, {"h0_zero": h0_zero, "beta2_all_zero": all_zero, "ok": h0_zero and all_zero}


# {{{ envelopes

ENVELOPE_CASES = (
    # (kind, (alpha, beta, d), regime)
    ("Z", (0.5, 1.0, 1), "small"),
    ("Z", (0.5, 1.5, 1), "small"),
    ("Z", (0.5, 1.0, 2), "small"),
    ("Z", (0.5, 1.5, 1), "large"),
    ("Y", (1.0, 1.5, 1), "small"),
    ("Y", (0.7, 1.0, 2), "small"),
    ("Y", (0.7, 1.0, 3), "small"),
    ("Y", (1.0, 1.0, 1), "large"),
    ("gradZ", (0.5, 1.5, 1), "small"),
    ("gradZ", (0.5, 1.0, 2), "large"),
    ("gradY", (0.5, 1.5, 1), "small"),
    ("gradY", (1.0, 1.5, 1), "small"),
    ("gradY", (0.7, 1.5, 3), "small"),
    ("gradY", (0.7, 0.6, 1), "large"),
    ("dtY", (0.7, 1.5, 3), "small"),
    ("dtY", (0.3, 1.5, 1), "small"),
    ("dtY", (0.7, 1.0, 3), "small"),
    ("dtY", (0.3, 1.0, 1), "large"),
)

_KERNEL_FUNCS = {
    KernelKind.Z: kernels.z_kernel,
    KernelKind.Y: kernels.y_kernel,
    KernelKind.gradZ: kernels.z_gradient_norm,
    KernelKind.gradY: kernels.y_gradient_norm,
    KernelKind.dtY: kernels.y_time_derivative,
}


def envelope_ratio(kind: str, params: FracParams, regime: str, n: int = 100, seed: int = SEED):
    """Spread max/min of value over envelope at *n* random samples with
    :math:`t \\in [0.1, 10]` and :math:`R` in :math:`[10^{-3}, 1]` or
    :math:`[1, 10^3]`."""
    kind = KernelKind(kind)
    rng = np.random.default_rng(seed)
    t = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    lo, hi = (1.0e-3, 1.0) if regime == "small" else (1.0, 1.0e3)
    R = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    r = (R * t**params.alpha) ** (1 / params.beta)
    values = _KERNEL_FUNCS[kind](params, t, r)
    est = [kernels.asymptotic_envelope(kind, params, ti, ri) for ti, ri in zip(t, r)]
    q = values / np.array([e.envelope for e in est])
    return float(q.max() / q.min()), sorted({e.branch for e in est})


@_timed(6, "asymptotic envelopes", 10.0, None)
def criterion_envelopes():
    rows = []
    for kind, (a, b, d), regime in ENVELOPE_CASES:
        ratio, branches = envelope_ratio(kind, FracParams(a, b, d), regime)
        rows.append({"kind": kind, "params": (a, b, d), "regime": regime,
                     "branches": branches, "ratio": ratio})
    return max(row["ratio"] for row in rows), {"rows": rows}


# }}}

# }}}


# {{{ decay rates


@_timed(7, "optimal L2 decay", 0.05, 300.0)
def criterion_optimal_l2():
    reports = [
        experiments.experiment_optimal_l2(FracParams(a, b, d))
        for d, b, a in [(1, 2.0, 0.8), (1, 0.4, 0.5), (2, 2.0, 0.5)]
    ]
    worst = max(abs(r.fitted - r.predicted) for r in reports)
    floors = all(r.details["checks"]["lower_bound"] for r in reports)
    return worst, {
        "fitted": [r.fitted for r in reports],
        "floor_ratio": [r.details["floor_ratio"] for r in reports],
        "ok": floors,
    }


@_timed(8, "critical-dimension kink", 0.05, None)
def criterion_kink():
    rep = experiments.experiment_kink()
    return rep.fitted, rep.details


@_timed(9, "convergence to MZ", 5.0, None)
def criterion_zuazua():
    rep = experiments.experiment_convergence_to_Z(FracParams(0.5, 1.5, 1), p=1.0)
    return rep.details["bounded_ratio"], {**rep.details, "ok": rep.passed}


@_timed(10, "forced decay", 0.0, None)
def criterion_forced():
    """Measured value is the worst excess over the per-case tolerance."""
    params = FracParams(0.5, 1.5, 1)
    reps = [experiments.experiment_forced(params, gamma=g) for g in (2.0, 1.0)]
    excess = max(abs(r.fitted - r.predicted) - r.tolerance for r in reps)
    return excess, {"fitted": [r.fitted for r in reps], "predicted": [r.predicted for r in reps]}


@_timed(11, "weak-solution bound", 0.0, 300.0)
def criterion_weak():
    """Measured value is the worst slope excess over the bound plus margin."""
    params = FracParams(0.5, 1.0, 1)
    reps = [experiments.experiment_weak_decay(params, kernel=k) for k in ("exact", "perturbed")]
    excess = max(r.fitted - (r.predicted + r.tolerance) for r in reps)
    return excess, {
        "fitted": [r.fitted for r in reps],
        "dominated": [r.details["dominated_fraction"] for r in reps],
        "ode_slope": [r.details["ode_slope"] for r in reps],
        "ok": all(r.passed for r in reps),
    }


def residual_order(params: FracParams = FracParams(0.5, 1.0, 1), T: float = 4.0, n0: int = 64):
    """Observed order of :func:`~fracflow.spectral.residual` on exact
    snapshots as the time step is halved twice."""
    grid = spectral.SpectralGrid(1, 256, 20.0)
    u0 = spectral.Field.gaussian(grid, 1.0)
    res = []
    for n in (n0, 2 * n0, 4 * n0):
        times = np.linspace(0.0, T, n + 1)
        sol = [u0, *spectral.solve_homogeneous(params, u0, times[1:])]
        res.append(spectral.residual(params, sol))
    orders = [math.log2(res[i] / res[i + 1]) for i in range(2)]
    return min(orders), res


@_timed(12, "residual order under dt-halving", 0.8, None, upper=False)
def criterion_residual():
    worst, rows = math.inf, []
    for p in (FracParams(0.5, 1.0, 1), FracParams(0.3, 1.5, 1), FracParams(0.8, 2.0, 1)):
        order, res = residual_order(p)
        worst = min(worst, order)
        rows.append({"params": (p.alpha, p.beta, p.d), "order": order, "residuals": res})
    return worst, {"rows": rows}


# }}}


CRITERIA = (
    criterion_ml,
    criterion_kernels,
    criterion_mass,
    criterion_zy_link,
    criterion_fox,
    criterion_envelopes,
    criterion_optimal_l2,
    criterion_kink,
    criterion_zuazua,
    criterion_forced,
    criterion_weak,
    criterion_residual,
)


def run_acceptance(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        res = crit()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results

r"""Scalar special functions and fractional calculus on uniform grids.

The Mittag-Leffler function

.. math::

    E_{\alpha, \beta}(z) = \sum_{k = 0}^\infty \frac{z^k}{\Gamma(\beta + \alpha k)}

is evaluated on the real axis by one of three branches, selected per point:

* the power series, while :math:`|z|^{1/\alpha}` is small enough that the
  alternating terms do not cancel catastrophically;
* a Hankel-contour integral collapsed onto the negative real axis (plus the
  two pole residues when :math:`\alpha > 1`), evaluated with double
  exponential quadrature;
* the algebraic asymptotic expansion for very large negative arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import signal, special

from fracflow.errors import NoConvergence, PoleAtNonpositiveInteger

# {{{ configuration


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances shared by the series-based evaluators."""

    abs_tol: float = 1.0e-15
    rel_tol: float = 1.0e-13
    max_terms: int = 4000

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive: {self.abs_tol}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive: {self.rel_tol}")
        if self.max_terms < 8:
            raise ValueError(f"max_terms must be at least 8: {self.max_terms}")


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class SampledSignal:
    """Samples ``values[k] = f(t0 + k * dt)`` of a function of time."""

    values: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a sampled signal needs at least two samples")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive: {self.dt}")
        if self.t0 < 0:
            raise ValueError(f"t0 must be nonnegative: {self.t0}")
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @classmethod
    def from_function(cls, f, t_final: float, n: int, t0: float = 0.0):
        t = np.linspace(t0, t_final, n + 1)
        return cls(np.asarray(f(t), dtype=np.float64), (t_final - t0) / n, t0)


# }}}


# {{{ gamma


def _is_nonpositive_integer(z: complex, eps: float = 0.0) -> bool:
    return abs(z.imag) <= eps and z.real <= eps and abs(z.real - round(z.real)) <= eps


def log_gamma(z: complex) -> complex:
    """Principal branch of :math:`\\log \\Gamma(z)`.

    :raises PoleAtNonpositiveInteger: if *z* is one of the poles of Gamma.
        Callers that only need :math:`1 / \\Gamma(z)` should use
        :func:`rgamma`, which returns an exact zero there.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {z.real:g}")

    return complex(special.loggamma(z))


def log_abs_gamma(x: float) -> tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))`` for real *x*."""
    if _is_nonpositive_integer(complex(x)):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {x:g}")

    return float(special.gammaln(x)), float(special.gammasgn(x))


def rgamma(z):
    """Reciprocal Gamma function; exactly zero at the poles of Gamma."""
    return special.rgamma(z)


# }}}


# {{{ Mittag-Leffler


class MLKind(str, Enum):
    E_alpha_1 = "E_alpha_1"
    E_alpha_alpha = "E_alpha_alpha"
    Y_hat = "Y_hat"


# the power series is used while |z|^(1/alpha) stays below this value; the
# cancellation error is then about eps * exp(3)
_SERIES_RADIUS = 3.0
# the asymptotic expansion is used beyond this value, and only for |z| large
# enough that its smallest term is reached after a few dozen terms
_ASYMPTOTIC_RADIUS = 40.0
_ASYMPTOTIC_MIN_ABS = 1.0e3


def _ml_series(alpha: float, beta: float, z: np.ndarray, tol: ToleranceConfig):
    result = np.zeros_like(z)
    if z.size == 0:
        return result

    logz = np.log(np.abs(z), where=z != 0, out=np.full_like(z, -np.inf))
    sign = np.where(z < 0, -1.0, 1.0)
    active = np.ones(z.shape, dtype=bool)

    for k in range(tol.max_terms):
        lg = special.gammaln(beta + alpha * k)
        gs = special.gammasgn(beta + alpha * k)
        if k == 0:
            term = np.full_like(z, gs * math.exp(-lg))
        else:
            term = gs * sign**k * np.exp(k * logz - lg)
        result = np.where(active, result + term, result)

        # the terms first grow for large |z| and only then decay
        if k > 2:
            small = np.abs(term) <= tol.abs_tol + tol.rel_tol * np.abs(result)
            past_peak = k * alpha + beta > np.abs(z) ** (1.0 / alpha) + 1
            active &= ~(small & past_peak)
        if not active.any():
            break
    else:
        raise NoConvergence(
            f"Mittag-Leffler series did not converge in {tol.max_terms} terms"
        )

    return result


def _ml_asymptotic(alpha: float, beta: float, z: np.ndarray, tol: ToleranceConfig):
    """Algebraic expansion :math:`-\\sum_k z^{-k} / \\Gamma(\\beta - \\alpha k)`
    plus the exponential contributions, for large :math:`|z|`."""
    result = np.zeros_like(z)
    logz = np.log(np.abs(z))
    kmax = min(tol.max_terms, 200)
    best = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, kmax):
        arg = beta - alpha * k
        if arg <= 0 and arg == round(arg):
            term = np.zeros_like(z)
        else:
            # log form, since z^-k underflows where 1 / Gamma overflows
            gs = special.gammasgn(arg)
            term = -gs * np.sign(z) ** k * np.exp(-k * logz - special.gammaln(arg))
        mag = np.abs(term)

        # stop at the smallest term (optimal truncation)
        growing = (mag > best) & (mag > 0)
        active &= ~growing
        result = np.where(active, result + term, result)
        best = np.where(active & (mag > 0), np.minimum(best, mag), best)
        if not active.any():
            break

    # exponential terms: for z < 0 they come from the poles at
    # zeta = |z|^(1/alpha) exp(+-i pi / alpha), present on the principal
    # sheet only when alpha > 1; for z > 0 the dominant term is exp(z^(1/alpha))
    neg = z < 0
    if alpha > 1 and neg.any():
        zeta = np.abs(z[neg]) ** (1.0 / alpha) * np.exp(1j * np.pi / alpha)
        result[neg] += (2.0 / alpha) * np.real(zeta ** (1 - beta) * np.exp(zeta))
    pos = ~neg
    if pos.any():
        zeta = z[pos] ** (1.0 / alpha)
        result[pos] += zeta ** (1 - beta) * np.exp(zeta) / alpha

    return result


def _de_nodes(h: float):
    # tanh-sinh nodes on [0, 1] (as log(u) and log(du/dtau)) and exp-sinh
    # nodes on [0, inf) shifted later
    tau = np.arange(-6.0, 3.5 + h / 2, h)
    y = 0.5 * np.pi * np.sinh(tau)
    log_u = -np.logaddexp(0.0, -2.0 * y)
    log_jac = log_u + np.log(np.pi * np.cosh(tau)) - np.logaddexp(0.0, 2.0 * y)
    ts = (log_u, log_jac + np.log(h))

    tau = np.arange(-4.5, 2.5 + h / 2, h)
    y = 0.5 * np.pi * np.sinh(tau)
    es = (np.exp(y), np.exp(y) * 0.5 * np.pi * np.cosh(tau) * h)

    return ts, es


_DE_H = 1.0 / 32.0
_DE_NODES = _de_nodes(_DE_H)


def _ml_integral(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    r"""Evaluate :math:`E_{\alpha, \beta}(-x)` for :math:`x > 0` from

    .. math::

        \frac{1}{\pi} \int_0^\infty e^{-u} u^{\alpha - \beta}
        \frac{u^\alpha \sin \pi\beta + x \sin \pi(\beta - \alpha)}
        {u^{2 \alpha} + 2 x u^\alpha \cos \pi\alpha + x^2} \,\mathrm{d}u,

    valid for :math:`\beta < 1 + \alpha` and :math:`\alpha \ne 1`. The
    quadrature is split at the near-singular point :math:`u = x^{1/\alpha}`.
    """
    assert alpha != 1.0 and beta < 1.0 + alpha

    x = x[:, None]
    u0 = x ** (1.0 / alpha)
    s = np.minimum(u0, 60.0)

    sb = math.sin(math.pi * beta)
    sab = math.sin(math.pi * (beta - alpha))
    ca = math.cos(math.pi * alpha)
    a = alpha - beta

    def rational(ua):
        return (ua * sb + x * sab) / (ua * ua + 2.0 * x * ua * ca + x * x)

    # tanh-sinh piece on [0, s], in log space near u = 0
    (log_v, log_jac), (e_shift, e_jac) = _DE_NODES
    log_u = np.log(s) + log_v[None, :]
    u = np.exp(log_u)
    ua = np.exp(alpha * log_u)
    weight = np.exp(a * log_u + np.log(s) + log_jac[None, :] - u)
    left = np.sum(weight * rational(ua), axis=1)

    # exp-sinh piece on [s, inf)
    u = s + e_shift[None, :]
    ua = u**alpha
    right = np.sum(e_jac[None, :] * np.exp(-u) * u**a * rational(ua), axis=1)

    result = (left + right) / np.pi
    if alpha > 1:
        zeta = u0[:, 0] * np.exp(1j * np.pi / alpha)
        result += (2.0 / alpha) * np.real(zeta ** (1 - beta) * np.exp(zeta))

    return result


def _ml_negative(alpha: float, beta: float, x: np.ndarray, tol: ToleranceConfig):
    # E_{alpha, beta}(-x) for x > 0 in the non-series range
    if alpha == 1.0:
        if beta == 1.0:
            return np.exp(-x)
        if float(beta).is_integer():
            # E_{1, n + 1}(z) = (E_{1, n}(z) - 1 / (n - 1)!) / z
            result = -np.expm1(-x) / x
            for n in range(2, int(beta)):
                result = (result - 1.0 / math.factorial(n - 1)) / (-x)
            return result

        raise NoConvergence(
            f"E_(1, {beta}) is only available for |z| <= {_SERIES_RADIUS} "
            f"or |z| >= {_ASYMPTOTIC_RADIUS}"
        )

    # reduce beta below 1 + alpha with E_{a, b}(z) = (E_{a, b - a}(z) - 1/G(b - a)) / z
    if beta >= 1.0 + alpha:
        inner = _ml_negative(alpha, beta - alpha, x, tol)
        return (inner - special.rgamma(beta - alpha)) / (-x)

    return _ml_integral(alpha, beta, x)


def mittag_leffler(alpha: float, beta: float, z, tol: ToleranceConfig | None = None):
    r"""Two-parameter Mittag-Leffler function :math:`E_{\alpha, \beta}(z)`
    for real arguments.

    :arg alpha: order in :math:`(0, 2]`.
    :arg beta: positive second parameter.
    :arg z: real scalar or array.
    :returns: an array of the same shape as *z* (a float for scalar input).
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must be in (0, 2]: {alpha}")
    if not beta > 0:
        raise ValueError(f"beta must be positive: {beta}")
    if tol is None:
        tol = DEFAULT_TOLERANCE

    z = np.asarray(z, dtype=np.float64)
    scalar = z.ndim == 0
    zf = np.atleast_1d(z).ravel()
    result = np.empty_like(zf)

    radius = np.abs(zf) ** (1.0 / alpha)
    series = radius <= _SERIES_RADIUS
    asymptotic = (radius >= _ASYMPTOTIC_RADIUS) & (
        (np.abs(zf) >= _ASYMPTOTIC_MIN_ABS) | (alpha == 1.0) | (zf > 0)
    )
    middle = ~series & ~asymptotic

    # positive arguments have no cancellation, so the series is used further
    pos_middle = middle & (zf > 0)
    series |= pos_middle
    middle &= ~pos_middle

    if series.any():
        result[series] = _ml_series(alpha, beta, zf[series], tol)
    if asymptotic.any():
        result[asymptotic] = _ml_asymptotic(alpha, beta, zf[asymptotic], tol)
    if middle.any():
        result[middle] = _ml_negative(alpha, beta, -zf[middle], tol)

    if scalar:
        return float(result[0])
    return result.reshape(z.shape)


def ml_envelope(kind: MLKind | str, alpha: float, x, t: float = 1.0):
    r"""Comparison envelope of the Mittag-Leffler factors on the negative axis.

    * ``E_alpha_1``: :math:`1 / (1 + x)`,
    * ``E_alpha_alpha``: :math:`1 / (1 + x^2)`,
    * ``Y_hat``: :math:`t^{\alpha - 1} / (1 + x^2)` with
      :math:`x = |\xi|^\beta t^\alpha`.
    """
    kind = MLKind(kind)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("envelope argument must be nonnegative")

    if kind == MLKind.E_alpha_1:
        return 1.0 / (1.0 + x)
    if kind == MLKind.E_alpha_alpha:
        return 1.0 / (1.0 + x * x)
    if t <= 0:
        raise ValueError(f"time must be positive: {t}")
    return t ** (alpha - 1.0) / (1.0 + x * x)


# }}}


# {{{ fractional calculus on uniform grids


def gl_weights(alpha: float, n: int) -> np.ndarray:
    """Grünwald-Letnikov weights :math:`w_k = (-1)^k \\binom{\\alpha}{k}`,
    for :math:`k = 0, \\dots, n`."""
    if n < 1:
        raise ValueError(f"n must be at least 1: {n}")

    w = np.empty(n + 1)
    w[0] = 1.0
    k = np.arange(1, n + 1)
    w[1:] = np.cumprod(1.0 - (alpha + 1.0) / k)
    return w


def _causal_convolve(w: np.ndarray, f: np.ndarray) -> np.ndarray:
    n = f.size
    if n < 256:
        return np.convolve(w[:n], f)[:n]
    return signal.fftconvolve(w[:n], f)[:n]


def rl_integral(sig: SampledSignal, alpha: float) -> SampledSignal:
    r"""Riemann-Liouville integral :math:`J^\alpha f` with lower terminal
    ``sig.t0``, by product integration of the piecewise linear interpolant.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative: {alpha}")
    if alpha == 0:
        return sig

    f = sig.values
    n = f.size
    k = np.arange(n, dtype=np.float64)
    p = np.arange(n + 1, dtype=np.float64) ** (alpha + 1.0)

    # interior weights depend only on the lag m = n - j:
    # (m + 1)^(a + 1) - 2 m^(a + 1) + (m - 1)^(a + 1), and 1 for m = 0
    lag = np.empty(n)
    lag[0] = 1.0
    lag[1:] = p[2:] - 2.0 * p[1:-1] + p[:-2]

    result = _causal_convolve(lag, f)
    # replace the j = 0 weight by (n - 1)^(a + 1) - (n - a - 1) n^a
    result -= lag * f[0]
    result += (np.abs(k - 1.0) ** (alpha + 1.0) - (k - alpha - 1.0) * k**alpha) * f[0]
    result[0] = 0.0

    result *= sig.dt**alpha / special.gamma(alpha + 2.0)
    return SampledSignal(result, sig.dt, sig.t0)


def rl_derivative(sig: SampledSignal, alpha: float) -> SampledSignal:
    r"""Grünwald-Letnikov approximation of the Riemann-Liouville derivative
    :math:`\partial_t^\alpha f` (first order in ``dt``).

    The value at the first sample is not meaningful and is returned as is.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1]: {alpha}")
    if sig.values.size < 3:
        raise ValueError("need at least three samples")

    w = gl_weights(alpha, sig.values.size - 1)
    result = _causal_convolve(w, sig.values) / sig.dt**alpha
    return SampledSignal(result, sig.dt, sig.t0)


def caputo_derivative(sig: SampledSignal, alpha: float) -> SampledSignal:
    """Caputo derivative, i.e. the Riemann-Liouville derivative of
    ``f - f(t0)``."""
    shifted = SampledSignal(sig.values - sig.values[0], sig.dt, sig.t0)
    return rl_derivative(shifted, alpha)


# }}}

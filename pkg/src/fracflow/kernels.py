r"""Fundamental solutions of :math:`\partial_t^\alpha (u - u_0) + (-\Delta)^{\beta/2} u = f`.

The solution of the homogeneous problem is :math:`Z(t, \cdot) \star u_0` and
the forcing enters through :math:`Y`, where

.. math::

    Z(t, x) = \pi^{-d/2} |x|^{-d} H^{2, 1}_{2, 3}\left[
        2^{-\beta} t^{-\alpha} |x|^\beta \,\middle|\,
        \begin{matrix}
            (1, 1), (1, \alpha) \\
            (d / 2, \beta / 2), (1, 1), (1, \beta / 2)
        \end{matrix}\right],

and :math:`Y = \pi^{-d/2} t^{\alpha - 1} |x|^{-d} H^{2, 1}_{2, 3}[\cdots]` with
the second upper pair replaced by :math:`(\alpha, \alpha)`. In Fourier
variables these are :math:`(2\pi)^{-d/2} E_{\alpha, 1}(-|\xi|^\beta t^\alpha)`
and :math:`(2\pi)^{-d/2} t^{\alpha - 1} E_{\alpha, \alpha}(-|\xi|^\beta t^\alpha)`.

All kernels are radial and are evaluated at :math:`r = |x|`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from fracflow import foxh
from fracflow.errors import SingularAtOrigin
from fracflow.special import mittag_leffler

# parameters closer than this to a borderline case are snapped onto it
BORDERLINE_EPS = 1.0e-9


# {{{ parameters


@dataclass(frozen=True)
class FracParams:
    """Orders :math:`(\\alpha, \\beta)` and dimension :math:`d`."""

    alpha: float
    beta: float
    d: int

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1]: {self.alpha}")
        if not 0 < self.beta <= 2:
            raise ValueError(f"beta must be in (0, 2]: {self.beta}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer: {self.d}")

        # snap near-borderline values so that merged poles are detected
        alpha, beta, d = float(self.alpha), float(self.beta), int(self.d)
        for target in (1.0, 2.0, float(d), d / 2.0, alpha):
            if 0 < abs(beta - target) < BORDERLINE_EPS:
                beta = target
        if 0 < abs(alpha - 1.0) < BORDERLINE_EPS:
            alpha = 1.0

        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "d", d)

    @property
    def beta_eq_d(self) -> bool:
        return self.beta == self.d

    @property
    def d_eq_2beta(self) -> bool:
        return self.d == 2 * self.beta

    @property
    def beta_eq_alpha(self) -> bool:
        return self.beta == self.alpha

    @property
    def classical_time(self) -> bool:
        return self.alpha == 1.0


class KernelKind(str, Enum):
    Z = "Z"
    Y = "Y"
    gradZ = "gradZ"
    gradY = "gradY"
    dtY = "dtY"


def z_spec(params: FracParams) -> foxh.FoxHSpec:
    a, b, d = params.alpha, params.beta, params.d
    return foxh.FoxHSpec(
        m=2, n=1,
        upper=((1.0, 1.0), (1.0, a)),
        lower=((d / 2, b / 2), (1.0, 1.0), (1.0, b / 2)),
    )


def y_spec(params: FracParams) -> foxh.FoxHSpec:
    a, b, d = params.alpha, params.beta, params.d
    return foxh.FoxHSpec(
        m=2, n=1,
        upper=((1.0, 1.0), (a, a)),
        lower=((d / 2, b / 2), (1.0, 1.0), (1.0, b / 2)),
    )


def dty_spec(params: FracParams) -> foxh.FoxHSpec:
    # d/dt t^(a - 1 + a s) = (a - 1 + a s) t^(a - 2 + a s) lowers the
    # denominator Gamma(a + a s) to Gamma(a - 1 + a s)
    a, b, d = params.alpha, params.beta, params.d
    return foxh.FoxHSpec(
        m=2, n=1,
        upper=((1.0, 1.0), (a - 1.0, a)),
        lower=((d / 2, b / 2), (1.0, 1.0), (1.0, b / 2)),
    )


def gradient_spec(spec: foxh.FoxHSpec) -> foxh.FoxHSpec:
    """Spec of the radial derivative: :math:`\\partial_r [r^{-d} H] = -2 r^{-d-1}
    H'` where the first lower pair :math:`(d/2, \\beta/2)` becomes
    :math:`((d + 2)/2, \\beta/2)`."""
    (b1, B1), *rest = spec.lower
    return foxh.FoxHSpec(m=spec.m, n=spec.n, upper=spec.upper, lower=((b1 + 1, B1), *rest))


def similarity_variable(params: FracParams, t, r):
    """Argument :math:`2^{-\\beta} t^{-\\alpha} r^\\beta` of the Fox functions."""
    return 2.0 ** (-params.beta) * t ** (-params.alpha) * r**params.beta


# }}}


# {{{ kernels


def _prepare(t, r):
    t, r = np.broadcast_arrays(np.asarray(t, dtype=np.float64), np.asarray(r, dtype=np.float64))
    if np.any(~(t > 0)):
        raise ValueError("time must be positive")
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    return t, r


def _fox_radial(spec, params, t, r, policy):
    # pi^(-d/2) r^(-d) H(z), for r > 0 only
    z = similarity_variable(params, t, r)
    return np.pi ** (-params.d / 2) * r ** (-params.d) * foxh.eval(spec, z, policy)


def _mellin_at_origin(params: FracParams, which: str) -> float:
    r"""Mellin transform :math:`\int_0^\infty u^{s - 1} E_{\alpha, c}(-u) du` at
    :math:`s = d / \beta`, with :math:`c = 1` (``Z``) or :math:`c = \alpha` (``Y``)."""
    a = params.alpha
    s = params.d / params.beta
    if a == 1.0:
        return math.gamma(s)

    c = 1.0 if which == "Z" else a
    if abs(s - 1.0) < BORDERLINE_EPS:
        # pi / sin(pi s) / Gamma(c - a s) -> a as s -> 1 with c = a
        return a
    return math.pi / math.sin(math.pi * s) * float(special.rgamma(c - a * s))


def _value_at_origin(params: FracParams, t, which: str):
    # (2 pi)^-d |S^(d-1)| int rho^(d-1) E(-rho^beta t^alpha) drho
    d, a, b = params.d, params.alpha, params.beta
    area = 2 * np.pi ** (d / 2) / math.gamma(d / 2)
    power = -a * d / b + (a - 1.0 if which == "Y" else 0.0)
    return (2 * np.pi) ** (-d) * area / b * _mellin_at_origin(params, which) * t**power


def z_regular_at_origin(params: FracParams) -> bool:
    return params.classical_time or params.beta > params.d


def y_regular_at_origin(params: FracParams) -> bool:
    return params.classical_time or params.d < 2 * params.beta


def z_kernel(params: FracParams, t, r, policy: foxh.EvalPolicy | None = None):
    """Fundamental solution :math:`Z(t, r)`.

    :raises SingularAtOrigin: for ``r = 0`` unless :math:`\\alpha = 1` or
        :math:`\\beta > d`.
    """
    t, r = _prepare(t, r)
    out = np.empty(r.shape)

    origin = r == 0
    if origin.any():
        if not z_regular_at_origin(params):
            raise SingularAtOrigin(
                f"Z is unbounded at r = 0 for beta = {params.beta} <= d = {params.d}"
            )
        out[origin] = _value_at_origin(params, t[origin], "Z")

    if (~origin).any():
        out[~origin] = _fox_radial(z_spec(params), params, t[~origin], r[~origin], policy)

    return out if out.ndim else float(out)


def y_kernel(params: FracParams, t, r, policy: foxh.EvalPolicy | None = None):
    """Fundamental solution :math:`Y(t, r)` of the forcing term.

    :raises SingularAtOrigin: for ``r = 0`` when :math:`d \\ge 2\\beta` and
        :math:`\\alpha < 1`.
    """
    if params.classical_time:
        return z_kernel(params, t, r, policy)

    t, r = _prepare(t, r)
    out = np.empty(r.shape)

    origin = r == 0
    if origin.any():
        if not y_regular_at_origin(params):
            raise SingularAtOrigin(
                f"Y is unbounded at r = 0 for d = {params.d} >= 2 beta = {2 * params.beta}"
            )
        out[origin] = _value_at_origin(params, t[origin], "Y")

    if (~origin).any():
        tt, rr = t[~origin], r[~origin]
        out[~origin] = tt ** (params.alpha - 1) * _fox_radial(
            y_spec(params), params, tt, rr, policy
        )

    return out if out.ndim else float(out)


def _require_positive_radius(r) -> None:
    if np.any(r == 0):
        raise SingularAtOrigin("derivatives are only evaluated for r > 0")


def z_gradient_norm(params: FracParams, t, r, policy: foxh.EvalPolicy | None = None):
    r""":math:`|\nabla Z(t, x)|` at :math:`|x| = r > 0`.

    The gradient itself is ``-z_gradient_norm * x / |x|`` (``Z`` decreases
    radially).
    """
    t, r = _prepare(t, r)
    _require_positive_radius(r)
    spec = gradient_spec(z_spec(params))
    z = similarity_variable(params, t, r)
    out = 2 * np.pi ** (-params.d / 2) * r ** (-params.d - 1) * np.abs(foxh.eval(spec, z, policy))
    return out if out.ndim else float(out)


def z_gradient(params: FracParams, t: float, x, policy: foxh.EvalPolicy | None = None):
    """Gradient vector :math:`\\nabla Z(t, x) = -|\\nabla Z| \\, x / |x|` for a
    point *x* of shape ``(..., d)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.d:
        raise ValueError(f"expected points of dimension {params.d}, got {x.shape[-1]}")
    r = np.linalg.norm(x, axis=-1)
    mag = np.asarray(z_gradient_norm(params, t, r, policy))
    return -(mag / r)[..., None] * x


def y_gradient_norm(params: FracParams, t, r, policy: foxh.EvalPolicy | None = None):
    r""":math:`|\nabla Y(t, x)|` at :math:`|x| = r > 0`."""
    t, r = _prepare(t, r)
    _require_positive_radius(r)
    spec = gradient_spec(y_spec(params))
    z = similarity_variable(params, t, r)
    out = (
        2 * np.pi ** (-params.d / 2) * t ** (params.alpha - 1) * r ** (-params.d - 1)
        * np.abs(foxh.eval(spec, z, policy))
    )
    return out if out.ndim else float(out)


def y_time_derivative(params: FracParams, t, r, policy: foxh.EvalPolicy | None = None):
    r""":math:`|\partial_t Y(t, x)|` at :math:`|x| = r > 0`."""
    t, r = _prepare(t, r)
    _require_positive_radius(r)
    z = similarity_variable(params, t, r)
    out = (
        np.pi ** (-params.d / 2) * t ** (params.alpha - 2) * r ** (-params.d)
        * np.abs(foxh.eval(dty_spec(params), z, policy))
    )
    return out if out.ndim else float(out)


def z_hat(params: FracParams, t: float, xi_norm):
    """Fourier transform :math:`(2\\pi)^{-d/2} E_{\\alpha, 1}(-|\\xi|^\\beta t^\\alpha)`."""
    if not t > 0:
        raise ValueError(f"time must be positive: {t}")
    x = np.asarray(xi_norm, dtype=np.float64) ** params.beta * t**params.alpha
    return (2 * np.pi) ** (-params.d / 2) * mittag_leffler(params.alpha, 1.0, -x)


def y_hat(params: FracParams, t: float, xi_norm):
    """Fourier transform :math:`(2\\pi)^{-d/2} t^{\\alpha - 1}
    E_{\\alpha, \\alpha}(-|\\xi|^\\beta t^\\alpha)`."""
    if not t > 0:
        raise ValueError(f"time must be positive: {t}")
    x = np.asarray(xi_norm, dtype=np.float64) ** params.beta * t**params.alpha
    return (
        (2 * np.pi) ** (-params.d / 2)
        * t ** (params.alpha - 1)
        * mittag_leffler(params.alpha, params.alpha, -x)
    )


# }}}


# {{{ self-similar profile


class SelfSimilarProfile:
    r"""Fast evaluation of :math:`Z(t, r) = t^{-\alpha d/\beta}
    \Phi(r t^{-\alpha/\beta})` from a spline of :math:`\log \Phi` in
    :math:`\log \rho` built once from the Fox engine.

    Outside the tabulated range the Fox engine is called directly.
    """

    def __init__(
        self,
        params: FracParams,
        rho_range: tuple[float, float] = (1.0e-6, 1.0e6),
        per_decade: int = 160,
        policy: foxh.EvalPolicy | None = None,
    ) -> None:
        from scipy.interpolate import CubicSpline

        self.params = params
        self.policy = policy
        lo, hi = (math.log(v) for v in rho_range)
        n = int(per_decade * (hi - lo) / math.log(10)) + 1
        u = np.linspace(lo, hi, n)
        phi = z_kernel(params, 1.0, np.exp(u), policy)
        self._range = (lo, hi)
        self._spline = CubicSpline(u, np.log(phi))
        self._origin = (
            float(_value_at_origin(params, 1.0, "Z")) if z_regular_at_origin(params) else None
        )

    def profile(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        out = np.empty(rho.shape)
        zero = rho == 0
        if zero.any():
            if self._origin is None:
                raise SingularAtOrigin("Z is unbounded at r = 0 for these parameters")
            out[zero] = self._origin
        with np.errstate(divide="ignore"):
            u = np.log(rho)
        lo, hi = self._range
        inside = ~zero & (u >= lo) & (u <= hi)
        out[inside] = np.exp(self._spline(u[inside]))
        rest = ~zero & ~inside
        if rest.any():
            out[rest] = z_kernel(self.params, 1.0, rho[rest], self.policy)
        return out

    def __call__(self, t: float, r):
        a, b, d = self.params.alpha, self.params.beta, self.params.d
        scale = t ** (a / b)
        return scale ** (-d) * self.profile(np.asarray(r, dtype=np.float64) / scale)


# }}}


# {{{ mass


def kernel_mass(
    params: FracParams,
    t: float = 1.0,
    z_window: tuple[float, float] = (1.0e-4, 1.0e4),
    n: int = 400,
    policy: foxh.EvalPolicy | None = None,
) -> float:
    r"""Integral of :math:`Z(t, \cdot)` over :math:`\mathbb{R}^d`.

    In the similarity variable the mass is
    :math:`2 / (\beta \Gamma(d/2)) \int_0^\infty H(z) \, dz / z`. The window
    *z_window* is integrated with Gauss-Legendre nodes in :math:`\log z`;
    both tails are added in closed form from the residue expansions
    (left poles below the window, right poles above it), which matters for
    the heavy :math:`|x|^{-d-\beta}` tails when :math:`\beta < 2`.

    The result does not depend on *t*, which is kept for symmetry.
    """
    if policy is None:
        policy = foxh.DEFAULT_POLICY
    spec = z_spec(params)
    z0, z1 = z_window

    x, w = np.polynomial.legendre.leggauss(n)
    u0, u1 = math.log(z0), math.log(z1)
    u = 0.5 * (u1 - u0) * x + 0.5 * (u1 + u0)
    core = 0.5 * (u1 - u0) * np.dot(w, foxh.eval(spec, np.exp(u), policy))

    return 2.0 / (params.beta * math.gamma(params.d / 2)) * (
        core + _tail_below(spec, z0, policy) + _tail_above(spec, z1, policy)
    )


def _tail_below(spec, z0: float, policy) -> float:
    # int_0^z0 Res_k(z) dz / z for the leading left poles, from the Laurent
    # data: Res = sigma e^l z^(-s0) P(log z)
    total = 0.0
    table = foxh._laurent_table(spec, "left", 16, policy.collision_eps)
    for _, lau in table:
        if lau.order <= 0:
            continue
        a = -lau.location
        term = _integrate_residue_below(lau, a, z0)
        total += term
        if abs(term) < 1.0e-16 * max(abs(total), 1e-300):
            break
    return total


def _integrate_residue_below(lau, a: float, z0: float) -> float:
    # Gauss-Laguerre in v = a (log z0 - log z) handles the polynomial in log z
    v, w = special.roots_laguerre(16)
    logz = math.log(z0) - v / a
    res = foxh._residue(lau, logz)
    # dz / z = dv / a and z^a = z0^a e^-v; _residue includes z^a already
    return float(np.dot(w * np.exp(v), res)) / a


def _tail_above(spec, z1: float, policy) -> float:
    if spec.n == 0:
        return 0.0
    total = 0.0
    table = foxh._laurent_table(spec, "right", 16, policy.collision_eps)
    for _, lau in table:
        if lau.order <= 0:
            continue
        a = lau.location
        v, w = special.roots_laguerre(16)
        logz = math.log(z1) + v / a
        res = -foxh._residue(lau, logz)
        term = float(np.dot(w * np.exp(v), res)) / a
        total += term
        if abs(term) < 1.0e-16 * max(abs(total), 1e-300):
            break
    return total


# }}}


# {{{ asymptotic envelopes


class Regime(str, Enum):
    small = "small"
    large = "large"


@dataclass(frozen=True)
class RegimeEstimate:
    """Similarity variable :math:`R = |x|^\\beta t^{-\\alpha}`, the matching
    regime and the envelope formula evaluated at :math:`(t, x)`."""

    R: float
    regime: Regime
    envelope: float
    branch: str


def asymptotic_envelope(kind: KernelKind | str, params: FracParams, t: float, r: float) -> RegimeEstimate:
    """Envelope of the kernel *kind* in the small (:math:`R \\le 1`) or large
    (:math:`R \\ge 1`) regime.

    For :math:`\\beta = 2` the large-regime formulas are upper bounds only.
    """
    kind = KernelKind(kind)
    a, b, d = params.alpha, params.beta, params.d
    if not t > 0:
        raise ValueError(f"time must be positive: {t}")
    if r < 0:
        raise ValueError(f"radius must be nonnegative: {r}")

    R = r**b * t ** (-a)
    regime = Regime.small if R <= 1 else Regime.large

    def need_r():
        if r == 0:
            raise SingularAtOrigin(f"{kind.value} envelope is singular at r = 0")

    if kind == KernelKind.dtY:
        if regime == Regime.small:
            inner = asymptotic_envelope(KernelKind.Y, params, t, r)
            return RegimeEstimate(R, regime, inner.envelope / t, "dtY-small:" + inner.branch)
        need_r()
        return RegimeEstimate(R, regime, t ** (2 * a - 2) * r ** (-d - b), "dtY-large")

    if regime == Regime.large:
        need_r()
        if kind == KernelKind.Z:
            env, branch = t**a * r ** (-d - b), "Z-large"
        elif kind == KernelKind.Y:
            env, branch = t ** (2 * a - 1) * r ** (-d - b), "Y-large"
        elif kind == KernelKind.gradZ:
            env, branch = t**a * r ** (-d - 1 - b), "gradZ-large"
        else:
            env, branch = t ** (2 * a - 1) * r ** (-d - 1 - b), "gradY-large"
        if b == 2:
            branch += "-upper"
        return RegimeEstimate(R, regime, env, branch)

    if kind == KernelKind.Z:
        if a == 1 or b > d:
            env, branch = t ** (-a * d / b), "Z-small-regular"
        elif b == d:
            need_r()
            env, branch = t ** (-a) * (abs(math.log(R)) + 1), "Z-small-log"
        else:
            need_r()
            env, branch = t ** (-a) * r ** (-d + b), "Z-small-singular"
    elif kind == KernelKind.Y:
        if a == 1 or d < 2 * b:
            env, branch = t ** (a - 1 - a * d / b), "Y-small-regular"
        elif d == 2 * b:
            need_r()
            env, branch = t ** (-a - 1) * abs(math.log(2.0 ** (-b) * R)), "Y-small-log"
        else:
            need_r()
            env, branch = t ** (-a - 1) * r ** (-d + 2 * b), "Y-small-singular"
    elif kind == KernelKind.gradZ:
        need_r()
        env, branch = t ** (-a) * r ** (-d - 1 + b), "gradZ-small"
    else:
        need_r()
        if a == 1 or d + 2 < 2 * b:
            env, branch = t ** (a - 1 - a * (d + 2) / b) * r, "gradY-small-regular"
        elif d + 2 == 2 * b:
            env, branch = t ** (-a - 1) * abs(r * math.log(2.0 ** (-b) * R)), "gradY-small-log"
        else:
            env, branch = t ** (-a - 1) * r ** (-d - 1 + 2 * b), "gradY-small-singular"

    return RegimeEstimate(R, regime, env, branch)


# }}}


# {{{ integrability thresholds


@dataclass(frozen=True)
class KappaThresholds:
    r"""Integrability exponents: :math:`\nabla Z \in L^p` for :math:`p < \kappa_1`,
    :math:`Y \in L^p` for :math:`p < \kappa_2` and :math:`Z \in L^p` for
    :math:`p < \kappa_3`."""

    kappa1: float
    kappa2: float
    kappa3: float


def kappa_thresholds(params: FracParams) -> KappaThresholds:
    b, d = params.beta, params.d
    return KappaThresholds(
        kappa1=d / (d - b + 1) if d > b - 1 else math.inf,
        kappa2=d / (d - 2 * b) if d > 2 * b else math.inf,
        kappa3=d / (d - b) if d > b else math.inf,
    )


@dataclass(frozen=True)
class Unbounded:
    """Marker for a kernel that is not in :math:`L^p`.

    At the threshold exponent itself the kernel still lies in weak
    :math:`L^p`; then *weak_envelope* holds the decay envelope of the weak
    quasinorm, otherwise it is ``None``.
    """

    kind: str
    p: float
    weak_envelope: float | None = None


def kernel_lp_bound(kind: KernelKind | str, params: FracParams, p: float, t: float):
    """Decay envelope of :math:`\\|K(t, \\cdot)\\|_{L^p}` for
    :math:`K \\in \\{Z, Y, \\nabla Z\\}`.

    :returns: the envelope value at *t*, or an :class:`Unbounded` marker.
    """
    kind = KernelKind(kind)
    if not 1 <= p <= math.inf:
        raise ValueError(f"p must be in [1, inf]: {p}")
    if not t > 0:
        raise ValueError(f"time must be positive: {t}")

    a, b, d = params.alpha, params.beta, params.d
    kappa = kappa_thresholds(params)
    spread = (a * d / b) * (1 - 1 / p)

    if kind == KernelKind.Z:
        everywhere = a == 1 or d == 1 <= b
        threshold, weak_exp = kappa.kappa3, -a
        exponent = -spread
    elif kind == KernelKind.Y:
        everywhere = a == 1 or d < 2 * b
        threshold, weak_exp = kappa.kappa2, -1 - a
        exponent = a - 1 - spread
    elif kind == KernelKind.gradZ:
        everywhere = d == 1 and b == 2
        threshold, weak_exp = kappa.kappa1, -a
        exponent = -a / b - spread
    else:
        raise ValueError(f"no L^p bound for kind {kind.value}")

    if everywhere or p < threshold:
        return t**exponent
    if p == threshold:
        return Unbounded(kind.value, p, t**weak_exp)
    return Unbounded(kind.value, p)


# }}}

r"""Mild solutions on a periodic box through the Fourier transform.

Each Fourier mode of

.. math::

    \partial_t^\alpha (u - u_0) + (-\Delta)^{\beta / 2} u = f

decouples into a scalar Volterra equation with rate
:math:`\lambda = |\xi|^\beta`, whose solution is

.. math::

    \hat{u}(t) = E_{\alpha, 1}(-\lambda t^\alpha) \hat{u}_0
        + \int_0^t (t - s)^{\alpha - 1} E_{\alpha, \alpha}(-\lambda (t - s)^\alpha)
            \hat{f}(s) \, ds.

The box :math:`[-L, L)^d` is sampled at :math:`N` points per axis and the
frequencies are :math:`\xi = \pi k / L`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, special

from fracflow.errors import GridTooCoarse, QuadratureUnderResolved
from fracflow.kernels import FracParams
from fracflow.special import gl_weights, mittag_leffler

# above this many arguments the Mittag-Leffler values come from a spline table
TABLE_THRESHOLD = 4096


# {{{ grids and fields


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on :math:`[-L, L)^d`."""

    d: int
    N: int
    L: float

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ValueError(f"only d = 1 or d = 2 grids are supported: {self.d}")
        if self.N < 32 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 32: {self.N}")
        if not self.L > 0:
            raise ValueError(f"L must be positive: {self.L}")

    @property
    def h(self) -> float:
        return 2 * self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def coords(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.N // 2,) * self.d

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.coords] * self.d), indexing="ij")

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(x**2 for x in self.mesh()))

    def frequency_norm(self) -> np.ndarray:
        r""":math:`|\xi|` in the layout of :func:`numpy.fft.rfftn`."""
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        kr = np.fft.rfftfreq(self.N, d=1.0 / self.N)
        scale = np.pi / self.L
        if self.d == 1:
            return scale * np.abs(kr)
        kx, ky = np.meshgrid(k, kr, indexing="ij")
        return scale * np.sqrt(kx**2 + ky**2)

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfftn(values, axes=tuple(range(self.d)))

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(coeffs, s=self.shape, axes=tuple(range(self.d)))


@dataclass(frozen=True)
class Field:
    """Samples of a function on a :class:`SpectralGrid` at a given time."""

    grid: SpectralGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            if values.size != self.grid.N**self.grid.d:
                raise ValueError(
                    f"field has {values.size} values, expected {self.grid.N ** self.grid.d}"
                )
            values = values.reshape(self.grid.shape)
        if self.time < 0:
            raise ValueError(f"time must be nonnegative: {self.time}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: SpectralGrid, func, time: float = 0.0) -> Field:
        """Sample ``func(*coords)`` on the grid."""
        return cls(grid, func(*grid.mesh()), time)

    @classmethod
    def hot_cell(cls, grid: SpectralGrid, mass: float = 1.0) -> Field:
        """Discrete delta: a single cell at the origin carrying *mass*."""
        values = np.zeros(grid.shape)
        values[grid.origin_index] = mass / grid.cell_volume
        return cls(grid, values)

    @classmethod
    def gaussian(
        cls, grid: SpectralGrid, width: float = 1.0, mass: float = 1.0,
        center: float | tuple[float, ...] = 0.0,
    ) -> Field:
        center = np.broadcast_to(np.asarray(center, dtype=np.float64), (grid.d,))
        r2 = sum((x - c) ** 2 for x, c in zip(grid.mesh(), center))
        norm = mass / (2 * np.pi * width**2) ** (grid.d / 2)
        return cls(grid, norm * np.exp(-r2 / (2 * width**2)))


@dataclass(frozen=True)
class ForcingSchedule:
    """Forcing fields :math:`f(t_j, \\cdot)` at increasing times :math:`t_0 = 0 < t_1 < \\cdots`.

    Between samples the forcing is taken to be linear in time. The optional
    *gamma* records the decay :math:`\\|f(t)\\|_{L^1} \\lesssim (1 + t)^{-\\gamma}`.
    """

    grid: SpectralGrid
    times: np.ndarray
    fields: np.ndarray
    gamma: float | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        fields = np.asarray(self.fields, dtype=np.float64)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("need at least two forcing samples")
        if times[0] != 0.0:
            raise ValueError(f"forcing samples must start at t = 0: {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise ValueError("forcing sample times must be strictly increasing")
        if fields.shape != (times.size, *self.grid.shape):
            raise ValueError(f"forcing fields have shape {fields.shape}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", fields)

    @classmethod
    def separable(
        cls, grid: SpectralGrid, times, profile, amplitude, gamma: float | None = None,
    ) -> ForcingSchedule:
        """:math:`f(t, x) = a(t) \\phi(x)` from callables ``amplitude(t)`` and
        ``profile(*coords)``."""
        times = np.asarray(times, dtype=np.float64)
        phi = profile(*grid.mesh())
        amp = np.asarray(amplitude(times), dtype=np.float64)
        return cls(grid, times, amp.reshape(-1, *([1] * grid.d)) * phi, gamma)

    @classmethod
    def zero(cls, grid: SpectralGrid, t_final: float) -> ForcingSchedule:
        return cls(grid, [0.0, t_final], np.zeros((2, *grid.shape)))

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation in time (constant after the last sample)."""
        j = int(np.searchsorted(self.times, t, side="right")) - 1
        if j >= self.times.size - 1:
            return self.fields[-1]
        theta = (t - self.times[j]) / (self.times[j + 1] - self.times[j])
        return (1 - theta) * self.fields[j] + theta * self.fields[j + 1]


# }}}


# {{{ Mittag-Leffler multipliers


@lru_cache(maxsize=32)
def _ml_table(alpha: float, beta: float):
    # log E_{alpha, beta}(-x) against log x; E is completely monotone and
    # positive for 0 < alpha <= 1 and beta >= alpha
    u = np.linspace(math.log(1.0e-8), math.log(1.0e16), 24 * 400 + 1)
    v = np.log(mittag_leffler(alpha, beta, -np.exp(u)))
    return interpolate.CubicSpline(u, v), u[0], u[-1]


def ml_decay(alpha: float, beta: float, x) -> np.ndarray:
    r""":math:`E_{\alpha, \beta}(-x)` for :math:`x \ge 0`, vectorized.

    Large batches (more than :data:`TABLE_THRESHOLD` arguments) with
    :math:`\alpha < 1` are interpolated from a cached spline of
    :math:`\log E` in :math:`\log x` (relative error about :math:`10^{-12}`);
    arguments outside the table are evaluated directly.
    """
    x = np.asarray(x, dtype=np.float64)
    if alpha == 1.0 or x.size <= TABLE_THRESHOLD or beta < alpha:
        return np.asarray(mittag_leffler(alpha, beta, -x))

    spline, u0, u1 = _ml_table(float(alpha), float(beta))
    out = np.empty(x.shape)
    with np.errstate(divide="ignore"):
        u = np.log(x)
    inside = (u >= u0) & (u <= u1)
    out[inside] = np.exp(spline(u[inside]))
    if (~inside).any():
        out[~inside] = mittag_leffler(alpha, beta, -x[~inside])
    return out


def _multiplier(params: FracParams, lam: np.ndarray, t: float) -> np.ndarray:
    return ml_decay(params.alpha, 1.0, lam * t**params.alpha)


# }}}


# {{{ domain size


def tail_mass_radius(params: FracParams, t: float, tail_mass: float = 1.0e-4) -> float:
    r"""Radius beyond which the large-R envelope :math:`t^\alpha r^{-d-\beta}`
    carries less than *tail_mass*."""
    d, b = params.d, params.beta
    area = 2 * np.pi ** (d / 2) / math.gamma(d / 2)
    return (area * t**params.alpha / (b * tail_mass)) ** (1 / b)


def check_grid(
    params: FracParams, grid: SpectralGrid, t_max: float, min_relaxation: float = 0.5
) -> None:
    """Raise :class:`GridTooCoarse` if the lowest nonzero mode has relaxed
    below *min_relaxation* at *t_max*, i.e. the kernel width
    :math:`t^{\\alpha/\\beta}` is no longer small against the period.

    Passing ``min_relaxation=0`` disables the check. This is meant for
    quantities carried by frequencies of order one, such as the
    :math:`L^2` norm when :math:`d > 2\\beta`.
    """
    lam = (np.pi / grid.L) ** params.beta
    decay = float(mittag_leffler(params.alpha, 1.0, -lam * t_max**params.alpha))
    if decay < min_relaxation:
        raise GridTooCoarse(
            f"first mode decays to {decay:.3g} by t = {t_max:.6g}; "
            f"enlarge L = {grid.L:.6g}"
        )


# }}}


# {{{ homogeneous problem


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("need at least one output time")
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValueError("output times must be positive and strictly increasing")
    return times


def solve_homogeneous(
    params: FracParams, u0: Field, times, min_relaxation: float = 0.5
) -> list[Field]:
    r"""Solution of the unforced problem at each of *times*.

    :raises GridTooCoarse: see :func:`check_grid`.
    """
    grid = u0.grid
    if grid.d != params.d:
        raise ValueError(f"grid dimension {grid.d} != d = {params.d}")
    times = _check_times(times)
    check_grid(params, grid, times[-1], min_relaxation)

    u0_hat = grid.forward(u0.values)
    lam = grid.frequency_norm() ** params.beta
    return [
        Field(grid, grid.inverse(_multiplier(params, lam, t) * u0_hat), float(t))
        for t in times
    ]


def propagate(params: FracParams, u: Field, dt: float) -> Field:
    """Restart the solver from *u* as if it were initial data.

    This is only a semigroup step for :math:`\\alpha = 1`; for
    :math:`\\alpha < 1` the memory of the history is lost.
    """
    (out,) = solve_homogeneous(params, Field(u.grid, u.values, 0.0), [dt])
    return Field(u.grid, out.values, u.time + dt)


# }}}


# {{{ forced problem


def _forced_modes(params, lam, f_hat, s, t):
    r"""Product integration of :math:`\int_0^t K(t - \sigma) \hat{f}(\sigma) d\sigma`
    with piecewise-linear :math:`\hat{f}` on the nodes *s* (ending at *t*).

    With :math:`K_1(\tau) = \tau^\alpha E_{\alpha,\alpha+1}(-\lambda\tau^\alpha)`
    and :math:`K_2(\tau) = \tau^{\alpha+1} E_{\alpha,\alpha+2}(-\lambda\tau^\alpha)`
    the primitives of :math:`K`, each interval contributes exact weights.
    """
    a = params.alpha
    tau = (t - s)[:, None]
    x = lam[None, :] * tau**a
    k1 = tau**a * ml_decay(a, a + 1, x)
    k2 = tau ** (a + 1) * ml_decay(a, a + 2, x)

    # interval j = [s_j, s_{j+1}] maps to tau in [tau_{j+1}, tau_j]
    delta = np.diff(s)[:, None]
    dk2 = k2[:-1] - k2[1:]
    # weight of the left node s_j and of the right node s_{j+1}
    w_right = dk2 / delta - k1[1:]
    w_left = k1[:-1] - dk2 / delta

    return np.sum(w_left * f_hat[:-1] + w_right * f_hat[1:], axis=0)


def _forced_hat(params, grid, forcing: ForcingSchedule, t, lam, stride=1):
    times = forcing.times[::stride]
    fields = forcing.fields[::stride]
    keep = times < t
    s = np.append(times[keep], t)
    f = np.concatenate([fields[keep], forcing.at(t)[None]], axis=0)

    f_hat = np.stack([grid.forward(fj).ravel() for fj in f])
    return _forced_modes(params, lam.ravel(), f_hat, s, t).reshape(lam.shape)


def solve_forced(
    params: FracParams,
    u0: Field,
    forcing: ForcingSchedule,
    times,
    rel_tol: float = 1.0e-3,
) -> list[Field]:
    r"""Solution with forcing *forcing* at each of *times*.

    The forcing is linear between its sample times; the weakly singular
    :math:`(t - s)^{\alpha - 1}` weight is integrated exactly against it. The
    Duhamel integral is recomputed on every other sample as a resolution
    check.

    :raises QuadratureUnderResolved: if the coarse and fine Duhamel terms
        differ by more than *rel_tol* relative to their size.
    """
    grid = u0.grid
    if forcing.grid != grid:
        raise ValueError("forcing and initial data live on different grids")
    homogeneous = solve_homogeneous(params, u0, times)
    lam = grid.frequency_norm() ** params.beta

    result = []
    for hom in homogeneous:
        fine = _forced_hat(params, grid, forcing, hom.time, lam)
        if forcing.times.size > 4:
            coarse = _forced_hat(params, grid, forcing, hom.time, lam, stride=2)
            scale = np.max(np.abs(fine))
            diff = np.max(np.abs(fine - coarse))
            if scale > 0 and diff > rel_tol * scale:
                raise QuadratureUnderResolved(
                    f"forcing samples too sparse at t = {hom.time:.6g}: "
                    f"halving the resolution changes the result by {diff / scale:.3e}"
                )
        result.append(Field(grid, hom.values + grid.inverse(fine), hom.time))

    return result


# }}}


# {{{ residual


def residual(
    params: FracParams,
    solution: list[Field],
    forcing: ForcingSchedule | None = None,
) -> float:
    r"""Sup-norm of :math:`\partial_t^\alpha(\hat{u} - \hat{u}_0) + |\xi|^\beta
    \hat{u} - \hat{f}` over the low modes.

    *solution* must contain at least 8 snapshots on a uniform time grid
    starting at :math:`t = 0` (the first snapshot is :math:`u_0`). The time
    derivative uses Grünwald-Letnikov weights, which are first order for
    :math:`t` away from 0, so the supremum is taken over the later half of
    the snapshots and over modes with :math:`|k| \le N / 4`.
    """
    if len(solution) < 8:
        raise ValueError("need at least 8 snapshots")
    grid = solution[0].grid
    times = np.array([s.time for s in solution])
    dt = times[1] - times[0]
    if times[0] != 0.0 or not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0):
        raise ValueError("snapshots must be uniformly spaced starting at t = 0")

    xi = grid.frequency_norm()
    low = xi <= np.pi / grid.L * grid.N / 4
    lam = xi[low] ** params.beta
    scale = grid.cell_volume / (2 * np.pi) ** (grid.d / 2)

    u_hat = np.stack([grid.forward(s.values)[low] for s in solution]) * scale
    if forcing is None:
        f_hat = np.zeros_like(u_hat)
    else:
        f_hat = np.stack([grid.forward(forcing.at(t))[low] for t in times]) * scale

    w = gl_weights(params.alpha, len(solution) - 1)
    diff = u_hat - u_hat[0]
    frac = np.array(
        [np.tensordot(w[: n + 1][::-1], diff[: n + 1], axes=(0, 0)) for n in range(len(times))]
    ) / dt**params.alpha

    res = frac + lam * u_hat - f_hat
    later = slice(len(times) // 2, None)
    return float(np.max(np.abs(res[later]))) if res.size else 0.0


# }}}


# {{{ moments


def moments(u: Field):
    """Mass and first moment :math:`\\int x u \\, dx` (a vector for ``d = 2``)."""
    grid = u.grid
    vol = grid.cell_volume
    mass = float(np.sum(u.values) * vol)
    first = np.array([np.sum(x * u.values) * vol for x in grid.mesh()])
    return mass, (float(first[0]) if grid.d == 1 else first)


def absolute_moment(u: Field) -> float:
    """:math:`\\int |x| |u| \\, dx`."""
    return float(np.sum(u.grid.radius() * np.abs(u.values)) * u.grid.cell_volume)


# }}}


# {{{ radial inversion


@dataclass(frozen=True)
class RadialProfile:
    r: np.ndarray
    values: np.ndarray
    errors: np.ndarray = field(repr=False, default=None)


def _wynn_epsilon(partial: np.ndarray) -> tuple[float, float]:
    """Limit of a sequence by Wynn's epsilon algorithm, with the difference of
    the last two even-column estimates as an error indicator."""
    n = partial.size
    e_prev = np.zeros(n + 1)
    e_cur = partial.astype(np.float64).copy()
    estimates = []
    for k in range(1, n):
        diff = e_cur[1:] - e_cur[:-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            e_next = e_prev[1 : e_cur.size] + 1.0 / diff
        if not np.all(np.isfinite(e_next)):
            break
        e_prev, e_cur = e_cur, e_next
        if k % 2 == 0:
            estimates.append(e_cur[-1])
    if len(estimates) < 2:
        return float(partial[-1]), float(abs(partial[-1] - partial[-2]))
    return float(estimates[-1]), float(abs(estimates[-1] - estimates[-2]))


def _radial_kernel(d: int, rho, r: float):
    if d == 1:
        return np.cos(rho * r) / np.pi
    if d == 2:
        return rho * special.j0(rho * r) / (2 * np.pi)
    return rho * np.sin(rho * r) / (2 * np.pi**2 * r)


def _radial_zeros(d: int, r: float, count: int) -> np.ndarray:
    if d == 1:
        return (np.arange(count) + 0.5) * np.pi / r
    if d == 2:
        return special.jn_zeros(0, count) / r
    return np.arange(1, count + 1) * np.pi / r


def radial_profile_from_hat(
    params: FracParams,
    t: float,
    r_grid,
    intervals: int = 48,
    rel_tol: float = 1.0e-8,
) -> RadialProfile:
    r"""Inverse Fourier transform of :math:`E_{\alpha,1}(-|\xi|^\beta t^\alpha)`
    at the radii *r_grid*.

    The radial integral (cosine transform for :math:`d = 1`, Hankel
    transform of order 0 for :math:`d = 2`, :math:`\sin(\rho r) / r` for
    :math:`d = 3`) is split at the zeros of the oscillating factor and the
    partial sums are extrapolated with Wynn's epsilon algorithm.

    :raises QuadratureUnderResolved: if the extrapolation has not settled
        to *rel_tol*.
    """
    if params.d not in (1, 2, 3):
        raise ValueError(f"radial inversion needs d in {{1, 2, 3}}: {params.d}")
    if not t > 0:
        raise ValueError(f"time must be positive: {t}")
    r_grid = np.atleast_1d(np.asarray(r_grid, dtype=np.float64))
    if np.any(r_grid <= 0):
        raise ValueError("radii must be positive")

    a, b, d = params.alpha, params.beta, params.d
    x_gl, w_gl = np.polynomial.legendre.leggauss(40)

    def hat(rho):
        return mittag_leffler(a, 1.0, -(rho**b) * t**a)

    values = np.empty_like(r_grid)
    errors = np.empty_like(r_grid)
    for i, r in enumerate(r_grid):
        zeros = _radial_zeros(d, r, intervals)

        # first interval has the rho^beta cusp at the origin
        first, _ = integrate.quad(
            lambda rho: _radial_kernel(d, rho, r) * hat(rho), 0.0, zeros[0],
            epsabs=0.0, epsrel=1.0e-13, limit=200,
        )
        lo, hi = zeros[:-1, None], zeros[1:, None]
        rho = 0.5 * (hi - lo) * x_gl[None, :] + 0.5 * (hi + lo)
        pieces = 0.5 * (hi[:, 0] - lo[:, 0]) * np.sum(
            w_gl * _radial_kernel(d, rho, r) * hat(rho), axis=1
        )
        partial = first + np.concatenate([[0.0], np.cumsum(pieces)])
        values[i], errors[i] = _wynn_epsilon(partial)

        if errors[i] > rel_tol * abs(values[i]):
            raise QuadratureUnderResolved(
                f"radial inversion did not settle at r = {r:.6g}: "
                f"value {values[i]:.6e}, error {errors[i]:.3e}"
            )

    return RadialProfile(r_grid, values, errors)


# }}}

r"""Direct time stepping of weak solutions for general nonlocal kernels.

The spatial operator is

.. math::

    (\mathcal{L} u)(x) = 2 \, \mathrm{p.v.} \int_{\mathbb{R}^d}
        K(x, y) [u(x) - u(y)] \, dy,

so that :math:`\langle \mathcal{L} u, u \rangle = \iint K(x, y) [u(x) - u(y)]^2`,
for symmetric kernels with
:math:`\lambda |x - y|^{-d-\beta} \le K(x, y) \le \Lambda |x - y|^{-d-\beta}`.
The fractional Laplacian :math:`(-\Delta)^{\beta/2}` corresponds to
:math:`K = \tfrac{1}{2} C_{d,\beta} |x - y|^{-d-\beta}` with
:math:`C_{d,\beta} = 2^\beta \Gamma((d + \beta)/2) / (\pi^{d/2} |\Gamma(-\beta/2)|)`.

Outside the box the solution is taken to vanish, so mass leaks through the
boundary. Time is discretized with implicit Grünwald-Letnikov weights.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.optimize import brentq

from fracflow.errors import KernelBoundViolation, LinearSolveFailure, RootFindFailure
from fracflow.kernels import FracParams
from fracflow.norms import NormSeries, gagliardo_seminorm, lp_norm
from fracflow.spectral import Field, SpectralGrid
from fracflow.special import gl_weights

SPOT_CHECK_PAIRS = 1000


# {{{ kernels


def fractional_laplacian_constant(d: int, beta: float) -> float:
    r""":math:`C_{d,\beta}` in :math:`(-\Delta)^{\beta/2} u = C_{d,\beta}\,
    \mathrm{p.v.} \int (u(x) - u(y)) |x - y|^{-d-\beta} dy`."""
    return (
        2**beta * math.gamma((d + beta) / 2)
        / (np.pi ** (d / 2) * abs(math.gamma(-beta / 2)))
    )


def _pairwise_hash(xi, yi, seed: int):
    # symmetric pseudo-random number in [0, 1) from two integer cell labels
    a = 12.9898 + 0.618 * seed
    b = 78.233 + 0.414 * seed
    s = np.sin(a * (xi + yi) + b * (xi * yi) + seed) * 43758.5453
    return s - np.floor(s)


@dataclass(frozen=True)
class KernelSpec:
    r"""Symmetric kernel with :math:`\lambda |x-y|^{-d-\beta} \le K \le
    \Lambda |x-y|^{-d-\beta}`.

    *kernel_fn* maps arrays of points ``x, y`` of shape ``(n, d)`` to weights
    of shape ``(n,)``. The bounds are spot checked on
    :data:`SPOT_CHECK_PAIRS` seeded random pairs at construction.
    """

    beta: float
    lam: float
    Lam: float
    kernel_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d: int = 1
    symmetric: bool = True
    seed: int = 0
    name: str = "custom"

    def __post_init__(self) -> None:
        if not 0 < self.beta < 2:
            raise ValueError(f"beta must be in (0, 2): {self.beta}")
        if not 0 < self.lam <= self.Lam:
            raise ValueError(f"need 0 < lambda <= Lambda: {self.lam}, {self.Lam}")
        if not self.symmetric:
            raise ValueError("only symmetric kernels are supported")
        self.spot_check()

    def spot_check(self, n: int = SPOT_CHECK_PAIRS, extent: float = 10.0) -> None:
        rng = np.random.default_rng(self.seed)
        x = rng.uniform(-extent, extent, size=(n, self.d))
        y = rng.uniform(-extent, extent, size=(n, self.d))
        dist = np.linalg.norm(x - y, axis=1)
        ok = dist > 0
        x, y, dist = x[ok], y[ok], dist[ok]

        k = np.asarray(self.kernel_fn(x, y), dtype=np.float64)
        base = dist ** (-self.d - self.beta)
        slack = 1.0e-12
        if np.any(k < self.lam * base * (1 - slack)) or np.any(k > self.Lam * base * (1 + slack)):
            raise KernelBoundViolation(
                f"kernel '{self.name}' leaves [lambda, Lambda] = "
                f"[{self.lam:.6g}, {self.Lam:.6g}] on sampled pairs"
            )
        if np.max(np.abs(k - self.kernel_fn(y, x))) > slack * np.max(np.abs(k)):
            raise KernelBoundViolation(f"kernel '{self.name}' is not symmetric")

    def __call__(self, x, y):
        return self.kernel_fn(x, y)

    @classmethod
    def fractional_laplacian(cls, d: int, beta: float) -> KernelSpec:
        c = 0.5 * fractional_laplacian_constant(d, beta)

        def fn(x, y):
            return c * np.linalg.norm(x - y, axis=-1) ** (-d - beta)

        return cls(beta, c, c, fn, d=d, name="fractional-laplacian")

    @classmethod
    def riesz(cls, d: int, beta: float) -> KernelSpec:
        """Plain :math:`|x - y|^{-d-\\beta}` (:math:`\\lambda = \\Lambda = 1`)."""

        def fn(x, y):
            return np.linalg.norm(x - y, axis=-1) ** (-d - beta)

        return cls(beta, 1.0, 1.0, fn, d=d, name="riesz")

    @classmethod
    def perturbed(
        cls, d: int, beta: float, ratio: float = 0.5, seed: int = 0, cell: float = 0.5,
    ) -> KernelSpec:
        r"""Fractional-Laplacian kernel times a rough symmetric factor with
        values in :math:`[\mathrm{ratio}, 1]`, constant on cells of size
        *cell* and pseudo-random between cells."""
        if not 0 < ratio <= 1:
            raise ValueError(f"ratio must be in (0, 1]: {ratio}")
        c = 0.5 * fractional_laplacian_constant(d, beta)

        def fn(x, y):
            ix = np.floor(x / cell) @ (1.0 + 1000.0 * np.arange(d))
            iy = np.floor(y / cell) @ (1.0 + 1000.0 * np.arange(d))
            m = ratio + (1 - ratio) * _pairwise_hash(ix, iy, seed)
            return c * m * np.linalg.norm(x - y, axis=-1) ** (-d - beta)

        return cls(beta, ratio * c, c, fn, d=d, seed=seed, name=f"perturbed-{ratio:g}")


# }}}


# {{{ operator


@dataclass(frozen=True)
class NonlocalOperator:
    """Dense matrix of the discretized operator on a :class:`SpectralGrid`.

    ``matrix @ u`` approximates :math:`\\mathcal{L} u` at the grid points;
    ``weights`` holds the symmetric off-diagonal pair weights, whose row
    sums make up the diagonal together with the far-field term ``far``.
    """

    kernel: KernelSpec
    grid: SpectralGrid
    weights: np.ndarray = field(repr=False)
    far: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        w = self.weights
        return np.diag(w.sum(axis=1) + self.far) - w

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.ravel(u)
        return (self.weights.sum(axis=1) + self.far) * u - self.weights @ u

    def quadratic_form(self, u: np.ndarray) -> float:
        r""":math:`\iint K (u(x) - u(y))^2` for *u* extended by zero."""
        u = np.ravel(u)
        return float(u @ self.apply(u)) * self.grid.cell_volume


def _points(grid: SpectralGrid) -> np.ndarray:
    return np.stack([x.ravel() for x in grid.mesh()], axis=-1)


def _far_field(grid: SpectralGrid, beta: float, Lam: float, pts: np.ndarray) -> np.ndarray:
    # 2 Lambda int_{outside} |x - y|^{-d-beta} dy, one half-space per face;
    # for d = 2 the corner overlaps are counted twice (an upper bound)
    d = grid.d
    lo, hi = -grid.L - grid.h / 2, grid.L - grid.h / 2
    kappa = np.pi ** ((d - 1) / 2) * math.gamma((1 + beta) / 2) / math.gamma((d + beta) / 2)
    total = np.zeros(pts.shape[0])
    for k in range(d):
        for gap in (hi - pts[:, k], pts[:, k] - lo):
            total += kappa * gap ** (-beta) / beta
    return 2 * Lam * total


def _moment_factor(d: int, beta: float, lag):
    # for d = 1, matches the second moment of |y|^{-1-beta} over each cell:
    # int_{cell} |y|^{1-beta} dy / (h |y_j|^{1-beta})
    if d != 1:
        return 1.0
    j = np.abs(np.asarray(lag, dtype=np.float64))
    e = 2 - beta
    return ((j + 0.5) ** e - (j - 0.5) ** e) / (e * j ** (1 - beta))


def _neighbor_links(grid: SpectralGrid):
    # index pairs of axis neighbours on the flattened grid
    idx = np.arange(grid.N**grid.d).reshape(grid.shape)
    links = []
    for axis in range(grid.d):
        a = np.take(idx, np.arange(grid.N - 1), axis=axis).ravel()
        b = np.take(idx, np.arange(1, grid.N), axis=axis).ravel()
        links.append((a, b))
    return links


def assemble_operator(kernel: KernelSpec, grid: SpectralGrid) -> NonlocalOperator:
    r"""Discretize :math:`\mathcal{L}` on *grid*.

    Off-diagonal pairs use the midpoint rule. The excluded self cell is
    replaced by the second-order term of the Taylor expansion, which for
    :math:`|y| < \rho` contributes
    :math:`-\tfrac{1}{d} \Delta u \int_{|y|<\rho} |y|^2 K \, dy` and is
    discretized with the standard Laplacian stencil (the cell is replaced by
    the ball of equal volume for ``d = 2``). The exterior of the box, where
    the solution vanishes, is folded into the diagonal with the upper bound
    :math:`\Lambda`.
    """
    if kernel.d != grid.d:
        raise ValueError(f"kernel dimension {kernel.d} != grid dimension {grid.d}")
    d, h, beta = grid.d, grid.h, kernel.beta
    pts = _points(grid)
    n = pts.shape[0]
    vol = grid.cell_volume

    weights = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    chunk = 1 << 20
    for start in range(0, iu.size, chunk):
        i, j = iu[start : start + chunk], ju[start : start + chunk]
        weights[i, j] = 2 * vol * kernel(pts[i], pts[j]) * _moment_factor(d, beta, j - i)
    weights = weights + weights.T

    # self-cell correction as a Laplacian stencil with local kernel strength
    rho = h / 2 if d == 1 else h / math.sqrt(math.pi)
    sphere = 2.0 if d == 1 else 2 * math.pi
    moment = sphere * rho ** (2 - beta) / (2 - beta)
    probe = np.zeros(d)
    probe[0] = rho
    strength = kernel(pts, pts + probe) * rho ** (d + beta)
    for a, b in _neighbor_links(grid):
        c = 0.5 * (strength[a] + strength[b]) * moment / (d * h**2)
        weights[a, b] += c
        weights[b, a] += c

    far = _far_field(grid, beta, kernel.Lam, pts)
    return NonlocalOperator(kernel, grid, weights, far)


# }}}


# {{{ time stepping


@dataclass
class MemoryState:
    """Full history of the implicit Grünwald-Letnikov scheme."""

    u0: np.ndarray
    weights: np.ndarray
    history: np.ndarray
    step: int = 0

    @classmethod
    def start(cls, u0: np.ndarray, alpha: float, n_steps: int) -> MemoryState:
        history = np.empty((n_steps + 1, u0.size))
        history[0] = u0
        return cls(u0.copy(), gl_weights(alpha, n_steps), history, 0)

    def memory_term(self) -> np.ndarray:
        """:math:`\\sum_{k=1}^{n} w_k (u_{n-k} - u_0)` for the next step ``n``."""
        n = self.step + 1
        past = self.history[:n] - self.u0
        return self.weights[n:0:-1] @ past

    def push(self, u: np.ndarray) -> None:
        self.step += 1
        self.history[self.step] = u


def evolve(
    params: FracParams, op: NonlocalOperator, u0: Field, dt: float, n_steps: int,
) -> list[Field]:
    r"""Implicit scheme
    :math:`\Delta t^{-\alpha} \sum_{k=0}^{n} w_k (u_{n-k} - u_0) + \mathcal{L} u_n = 0`.

    The matrix :math:`I + \Delta t^\alpha \mathcal{L}` is factorized once.

    :returns: ``n_steps + 1`` fields, starting with *u0*.
    :raises LinearSolveFailure: if the factorization is singular or the
        solution stops being finite.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive: {dt}")
    if n_steps < 1:
        raise ValueError(f"need at least one step: {n_steps}")
    if u0.grid != op.grid:
        raise ValueError("initial data and operator live on different grids")

    grid = op.grid
    a = params.alpha
    system = np.eye(grid.N**grid.d) + dt**a * op.matrix
    try:
        with np.errstate(all="raise"):
            lu = la.lu_factor(system, check_finite=True)
    except (la.LinAlgError, FloatingPointError, ValueError) as exc:
        raise LinearSolveFailure(f"could not factorize the step matrix: {exc}") from exc
    if np.any(np.diag(lu[0]) == 0):
        raise LinearSolveFailure("step matrix is singular")

    state = MemoryState.start(u0.values.ravel(), a, n_steps)
    for _ in range(n_steps):
        # u_n - u_0 + dt^a L u_n = -sum_{k>=1} w_k (u_{n-k} - u_0)
        rhs = state.u0 - state.memory_term()
        u = la.lu_solve(lu, rhs)
        if not np.all(np.isfinite(u)):
            raise LinearSolveFailure(f"non-finite solution at step {state.step + 1}")
        state.push(u)

    return [
        Field(grid, state.history[k].reshape(grid.shape), k * dt)
        for k in range(n_steps + 1)
    ]


# }}}


# {{{ norms along a trajectory


def l1_series(states: list[Field]) -> NormSeries:
    return NormSeries(
        np.array([s.time for s in states]),
        np.array([lp_norm(s, 1.0) for s in states]),
        p=1.0,
    )


@dataclass(frozen=True)
class EnergyCheck:
    r"""Discrete form of
    :math:`\partial_t^\alpha (\|u\|_2 - \|u_0\|_2) + \mu \|u\|_2^{1 + 2\beta/d} \le 0`.

    *nash_constant* is the smallest :math:`C` with
    :math:`\|u\|_2^{2 + 2\beta/d} \le C \|u\|_1^{2\beta/d} [u]^2` over the
    states (the Gagliardo seminorm uses the plain kernel
    :math:`|x - y|^{-d-\beta}`) and :math:`\mu = \lambda / (C \|u_0\|_1^{2\beta/d})`.
    *slack* is minus the left-hand side at each step after the first.
    """

    series: NormSeries
    mu: float
    nash_constant: float
    slack: np.ndarray
    fraction_satisfied: float


def energy_series(
    params: FracParams, op: NonlocalOperator, states: list[Field], tol: float = 1.0e-10,
) -> EnergyCheck:
    if len(states) < 8:
        raise ValueError("need at least 8 states")
    times = np.array([s.time for s in states])
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0):
        raise ValueError("states must be uniformly spaced in time")

    d, beta = op.grid.d, op.kernel.beta
    norms2 = np.array([lp_norm(s, 2.0) for s in states])
    norms1 = np.array([lp_norm(s, 1.0) for s in states])
    series = NormSeries(times, norms2, p=2.0)
    gamma = 1 + 2 * beta / d

    if norms2[0] == 0:
        slack = np.zeros(len(states) - 1)
        return EnergyCheck(series, 0.0, 0.0, slack, 1.0)

    semi = np.array([gagliardo_seminorm(s, beta / 2, 2) ** 2 for s in states])
    live = (semi > 0) & (norms1 > 0)
    nash = float(np.max(norms2[live] ** (gamma + 1) / (norms1[live] ** (2 * beta / d) * semi[live])))
    mu = op.kernel.lam / (nash * norms1[0] ** (2 * beta / d))

    w = gl_weights(params.alpha, len(states) - 1)
    diff = norms2 - norms2[0]
    frac = np.array([w[: n + 1] @ diff[n::-1] for n in range(1, len(states))]) / dt**params.alpha
    lhs = frac + mu * norms2[1:] ** gamma
    slack = -lhs
    ok = slack >= -tol * np.maximum(np.abs(frac), mu * norms2[1:] ** gamma)
    return EnergyCheck(series, mu, nash, slack, float(np.mean(ok)))


# }}}


# {{{ comparison equation


def solve_comparison_ode(
    alpha: float, mu: float, gamma: float, w0: float, t_grid,
) -> np.ndarray:
    r"""Solve :math:`\partial_t^\alpha (w - w_0) + \mu w^\gamma = 0` in the
    Volterra form :math:`w = w_0 - \mu J^\alpha (w^\gamma)`.

    The fractional integral uses product integration of the piecewise
    linear interpolant of :math:`w^\gamma`, and each step solves the
    scalar equation :math:`w + \mu c\, w^\gamma = r` for the new value.

    :raises RootFindFailure: if a step has no positive root.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size < 2 or t_grid[0] != 0.0:
        raise ValueError("t_grid must be a uniform grid starting at 0")
    h = t_grid[1] - t_grid[0]
    if not np.allclose(np.diff(t_grid), h, rtol=1e-9, atol=0):
        raise ValueError("t_grid must be uniform")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1]: {alpha}")
    if mu < 0 or not gamma > 1 or not w0 > 0:
        raise ValueError("need mu >= 0, gamma > 1 and w0 > 0")

    n = t_grid.size - 1
    w = np.empty(n + 1)
    w[0] = w0
    if mu == 0:
        w[:] = w0
        return w

    scale = mu * h**alpha / math.gamma(alpha + 2)
    k = np.arange(n + 1, dtype=np.float64)
    p = k ** (alpha + 1)
    # interior weights of the product trapezoid rule, indexed by lag
    lag = np.zeros(n + 1)
    lag[1:n] = p[2:] - 2 * p[1:-1] + p[:-2]
    g = np.empty(n + 1)
    g[0] = w0**gamma

    for m in range(1, n + 1):
        first = (m - 1) ** (alpha + 1) - (m - alpha - 1) * m**alpha
        memory = first * g[0]
        if m > 1:
            memory += lag[m - 1 : 0 : -1] @ g[1:m]
        rhs = w0 - scale * memory

        def residual(x, c=scale, r=rhs):
            return x + c * x**gamma - r

        if not rhs > 0:
            raise RootFindFailure(f"no positive root at step {m}: rhs = {rhs:.6g}")
        try:
            w[m] = brentq(residual, 0.0, rhs, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        except (ValueError, RuntimeError) as exc:
            raise RootFindFailure(f"root find failed at step {m}: {exc}") from exc
        g[m] = w[m] ** gamma

    return w


# }}}

r"""Fox H-functions on the positive real axis.

The function is defined by the Mellin-Barnes integral

.. math::

    H^{m, n}_{p, q}\left[z \,\middle|\, \begin{matrix}
        (a_i, \alpha_i)_{1, p} \\ (b_j, \beta_j)_{1, q}
    \end{matrix}\right]
    = \frac{1}{2 \pi i} \int_{\mathcal{L}} \mathcal{H}(s) z^{-s} \,\mathrm{d}s,
    \qquad
    \mathcal{H}(s) = \frac{
        \prod_{j = 1}^m \Gamma(b_j + \beta_j s)
        \prod_{i = 1}^n \Gamma(1 - a_i - \alpha_i s)}{
        \prod_{i = n + 1}^p \Gamma(a_i + \alpha_i s)
        \prod_{j = m + 1}^q \Gamma(1 - b_j - \beta_j s)},

where the contour separates the *left* poles of
:math:`\Gamma(b_j + \beta_j s)` from the *right* poles of
:math:`\Gamma(1 - a_i - \alpha_i s)`.

Three evaluation routes are provided:

* :func:`eval_small` sums the residues at the left poles (convergent for
  :math:`\mu > 0`, or :math:`\mu = 0` and small :math:`z`);
* :func:`eval_large` sums the residues at the right poles with optimal
  truncation (the expansion at infinity);
* :func:`eval_contour` integrates along a vertical line :math:`\Re s = c` with
  the trapezoidal rule, after moving the line to where the integrand is
  smallest and accounting for the residues it crosses.

Residues at poles of any order are computed from Laurent expansions of the
individual Gamma factors, so coincident poles (and poles cancelled by zeros
of the denominator) are handled exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import special

from fracflow.errors import (
    AsymptoticUnreliable,
    NoConvergence,
    OutOfConvergenceRegion,
    PoleHit,
)
from fracflow.special import ToleranceConfig

# {{{ types


@dataclass(frozen=True)
class FoxHSpec:
    """Parameters of :math:`H^{m, n}_{p, q}`.

    .. attribute:: upper

        Tuple of pairs :math:`(a_i, \\alpha_i)`, of length :math:`p`.

    .. attribute:: lower

        Tuple of pairs :math:`(b_j, \\beta_j)`, of length :math:`q`.
    """

    m: int
    n: int
    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        upper = tuple((float(a), float(A)) for a, A in self.upper)
        lower = tuple((float(b), float(B)) for b, B in self.lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

        if not 0 <= self.m <= len(lower):
            raise ValueError(f"need 0 <= m <= q: m = {self.m}, q = {len(lower)}")
        if not 0 <= self.n <= len(upper):
            raise ValueError(f"need 0 <= n <= p: n = {self.n}, p = {len(upper)}")
        if any(A <= 0 for _, A in upper) or any(B <= 0 for _, B in lower):
            raise ValueError("all alpha_i and beta_j must be positive")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def mu(self) -> float:
        r""":math:`\sum_j \beta_j - \sum_i \alpha_i`; the left residue series
        converges everywhere when it is positive."""
        return sum(B for _, B in self.lower) - sum(A for _, A in self.upper)

    @property
    def delta(self) -> float:
        r"""Radius of convergence of the left residue series when
        :math:`\mu = 0`, :math:`\prod_i \alpha_i^{-\alpha_i} \prod_j \beta_j^{\beta_j}`."""
        log_delta = sum(B * math.log(B) for _, B in self.lower) - sum(
            A * math.log(A) for _, A in self.upper
        )
        return math.exp(log_delta)

    @property
    def a_star(self) -> float:
        """Exponential decay rate of the kernel along vertical lines; the
        Mellin-Barnes integral converges absolutely when it is positive."""
        B = [B for _, B in self.lower]
        A = [A for _, A in self.upper]
        return sum(B[: self.m]) - sum(B[self.m :]) + sum(A[: self.n]) - sum(A[self.n :])

    def swapped(self) -> FoxHSpec:
        """Parameters of :math:`H(1/z)`, with kernel :math:`\\mathcal{H}(-s)`."""
        return FoxHSpec(
            m=self.n,
            n=self.m,
            upper=tuple((1.0 - b, B) for b, B in self.lower),
            lower=tuple((1.0 - a, A) for a, A in self.upper),
        )

    def shifted(self, sigma: float = 1.0) -> FoxHSpec:
        """Parameters of :math:`z^\\sigma H(z)`, with kernel
        :math:`\\mathcal{H}(s + \\sigma)`."""
        return FoxHSpec(
            m=self.m,
            n=self.n,
            upper=tuple((a + sigma * A, A) for a, A in self.upper),
            lower=tuple((b + sigma * B, B) for b, B in self.lower),
        )


@dataclass(frozen=True)
class Pole:
    """A (possibly merged) pole of the Mellin kernel.

    .. attribute:: indices

        Pairs ``(family, l)`` of every Gamma pole merged at this location,
        where *family* is the index into ``lower`` (left poles) or ``upper``
        (right poles).
    """

    location: float
    order: int
    indices: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PoleSet:
    left: tuple[Pole, ...]
    right: tuple[Pole, ...]


@dataclass(frozen=True)
class EvalPolicy:
    tol: ToleranceConfig = field(
        default_factory=lambda: ToleranceConfig(abs_tol=1.0e-300, rel_tol=1.0e-13)
    )
    crossover_z: float = 1.0
    collision_eps: float = 1.0e-9

    def __post_init__(self) -> None:
        if not self.crossover_z > 0:
            raise ValueError(f"crossover_z must be positive: {self.crossover_z}")
        if not 0 < self.collision_eps <= 1.0e-6:
            raise ValueError(f"collision_eps must be in (0, 1e-6]: {self.collision_eps}")


# Fox H values span hundreds of orders of magnitude, so the default
# tolerance is purely relative
DEFAULT_FOX_TOLERANCE = ToleranceConfig(abs_tol=1.0e-300, rel_tol=1.0e-13)
DEFAULT_POLICY = EvalPolicy(tol=DEFAULT_FOX_TOLERANCE)

# }}}


# {{{ Gamma factors and Laurent expansions


@dataclass(frozen=True)
class _Factor:
    # Gamma(offset + slope * s) ** power
    offset: float
    slope: float
    power: int
    family: int


def _factors(spec: FoxHSpec) -> tuple[_Factor, ...]:
    result = []
    for j, (b, B) in enumerate(spec.lower):
        if j < spec.m:
            result.append(_Factor(b, B, +1, j))
        else:
            result.append(_Factor(1.0 - b, -B, -1, j))
    for i, (a, A) in enumerate(spec.upper):
        if i < spec.n:
            result.append(_Factor(1.0 - a, -A, +1, i))
        else:
            result.append(_Factor(a, A, -1, i))

    # identical factors above and below the fraction bar cancel
    reduced = list(result)
    for f in result:
        if f.power < 0:
            match = [
                g for g in reduced
                if g.power > 0 and g.offset == f.offset and g.slope == f.slope
            ]
            if match:
                reduced.remove(match[0])
                reduced.remove(f)

    return tuple(reduced)


def _gamma_pole_index(w: float, eps: float) -> int | None:
    # index n if w is (numerically) the pole -n of Gamma
    n = round(w)
    if n <= 0 and abs(w - n) <= eps * max(1.0, abs(w)):
        return -n
    return None


def _polygamma(k: int, w: float) -> float:
    # polygamma for any real non-pole argument, shifted to w >= 1 first
    acc = 0.0
    sign = -1.0 if k % 2 == 0 else 1.0
    while w < 1.0:
        acc += sign * math.factorial(k) * w ** (-k - 1)
        w += 1.0
    if k == 0:
        return acc + float(special.digamma(w))
    return acc + float(special.polygamma(k, w))


@dataclass(frozen=True)
class _Laurent:
    r"""Expansion :math:`\mathcal{H}(s_0 + \epsilon) = \sigma e^{\ell}
    \epsilon^{-N} \exp(\sum_{k \ge 1} c_k \epsilon^k)`."""

    location: float
    order: int
    sign: float
    log_mag: float
    coeffs: tuple[float, ...]


def _laurent(factors, s0: float, nterms: int, eps: float) -> _Laurent:
    order = 0
    sign = 1.0
    log_mag = 0.0
    coeffs = np.zeros(nterms + 1)

    for f in factors:
        w = f.offset + f.slope * s0
        n = _gamma_pole_index(w, eps)
        g = f.slope
        if n is not None:
            # Gamma(-n + d) = (1/d) (-1)^n (pi d / sin(pi d)) / Gamma(1 + n - d)
            # with d = g * eps
            order += f.power
            sign *= (-1.0) ** n * (math.copysign(1.0, g) if f.power % 2 else 1.0)
            log_mag -= f.power * math.log(abs(g))
            log_mag -= f.power * math.lgamma(1.0 + n)
            for k in range(1, nterms + 1):
                ck = -((-1.0) ** k) * _polygamma(k - 1, 1.0 + n) / math.factorial(k)
                if k % 2 == 0:
                    ck += float(special.zeta(k)) / (k // 2)
                coeffs[k] += f.power * ck * g**k
        else:
            sign *= float(special.gammasgn(w)) ** abs(f.power)
            log_mag += f.power * float(special.gammaln(w))
            for k in range(1, nterms + 1):
                coeffs[k] += f.power * _polygamma(k - 1, w) * g**k / math.factorial(k)

    return _Laurent(s0, order, sign, log_mag, tuple(coeffs[1:]))


def _exp_series(g: list, n: int):
    # coefficients e_0..e_n of exp(sum_{k >= 1} g_k x^k); g_k may be arrays
    e = [1.0]
    for m in range(1, n + 1):
        e.append(sum(k * g[k - 1] * e[m - k] for k in range(1, m + 1)) / m)
    return e


def _residue(lau: _Laurent, logz):
    r"""Residue of :math:`\mathcal{H}(s) z^{-s}` at ``lau.location``."""
    if lau.order <= 0:
        return np.zeros_like(logz)

    n = lau.order - 1
    g = [lau.coeffs[k] - (logz if k == 0 else 0.0) for k in range(n)]
    poly = _exp_series(g, n)[n]
    with np.errstate(over="ignore", invalid="ignore"):
        return lau.sign * np.exp(lau.log_mag - lau.location * logz) * poly


# }}}


# {{{ poles


def _family_points(spec: FoxHSpec, side: str, count: int) -> list[tuple[float, int, int]]:
    points = []
    if side == "left":
        for j, (b, B) in enumerate(spec.lower[: spec.m]):
            points.append([(-(b + l) / B, j, l) for l in range(count)])
    else:
        for i, (a, A) in enumerate(spec.upper[: spec.n]):
            points.append([((1.0 - a + k) / A, i, k) for k in range(count)])

    if not points:
        return []

    # only keep locations that every family has enumerated past
    if side == "left":
        cutoff = max(fam[-1][0] for fam in points)
        flat = [pt for fam in points for pt in fam if pt[0] >= cutoff]
        flat.sort(key=lambda pt: -pt[0])
    else:
        cutoff = min(fam[-1][0] for fam in points)
        flat = [pt for fam in points for pt in fam if pt[0] <= cutoff]
        flat.sort(key=lambda pt: pt[0])

    return flat


def _group(points, eps: float):
    groups: list[list] = []
    for pt in points:
        if groups and abs(pt[0] - groups[-1][0][0]) <= eps * max(1.0, abs(pt[0])):
            groups[-1].append(pt)
        else:
            groups.append([pt])
    return groups


@lru_cache(maxsize=256)
def _laurent_table(
    spec: FoxHSpec, side: str, count: int, eps: float
) -> tuple[tuple[Pole, _Laurent], ...]:
    factors = _factors(spec)
    result = []
    for grp in _group(_family_points(spec, side, count), eps)[:count]:
        s0 = float(np.mean([pt[0] for pt in grp]))
        lau = _laurent(factors, s0, 0, eps)
        if lau.order > 0:
            lau = _laurent(factors, s0, lau.order - 1, eps)
        pole = Pole(s0, lau.order, tuple((pt[1], pt[2]) for pt in grp))
        result.append((pole, lau))

    return tuple(result)


def enumerate_poles(
    spec: FoxHSpec, count: int, policy: EvalPolicy | None = None
) -> PoleSet:
    """First *count* left and right pole groups of the Mellin kernel.

    Left poles are sorted by decreasing location and right poles by
    increasing location. Gamma poles closer than ``policy.collision_eps``
    are merged into a single higher order pole; locations where zeros of the
    denominator cancel the pole entirely are omitted.
    """
    if count < 1:
        raise ValueError(f"count must be at least 1: {count}")
    if policy is None:
        policy = DEFAULT_POLICY

    eps = policy.collision_eps
    left = tuple(p for p, _ in _laurent_table(spec, "left", count, eps) if p.order > 0)
    right = tuple(p for p, _ in _laurent_table(spec, "right", count, eps) if p.order > 0)
    return PoleSet(left=left, right=right)


# }}}


# {{{ kernel


def _log_kernel(factors, s):
    result = np.zeros(np.shape(s), dtype=np.complex128)
    for f in factors:
        result += f.power * special.loggamma(f.offset + f.slope * s)
    return result


def mellin_kernel(
    spec: FoxHSpec, s: complex, policy: EvalPolicy | None = None
) -> complex:
    r"""Evaluate the Mellin kernel :math:`\mathcal{H}(s)`.

    Denominator factors use the reciprocal Gamma function, so the kernel is
    exactly zero on their poles.

    :raises PoleHit: if *s* is within ``policy.collision_eps`` of a pole of a
        numerator factor.
    """
    if policy is None:
        policy = DEFAULT_POLICY

    s = complex(s)
    log_num = 0.0j
    den = 1.0 + 0.0j
    for f in _factors(spec):
        w = f.offset + f.slope * s
        if f.power > 0:
            if abs(w.imag) <= policy.collision_eps and _gamma_pole_index(
                w.real, policy.collision_eps
            ) is not None:
                raise PoleHit(f"s = {s} is a pole of Gamma({f.offset} + {f.slope} s)")
            log_num += special.loggamma(w)
        else:
            den *= special.rgamma(w)

    return complex(np.exp(log_num) * den)


def h_coefficients(
    spec: FoxHSpec, kmax: int, policy: EvalPolicy | None = None
) -> np.ndarray:
    r"""Coefficients :math:`h_k` of the expansion at infinity

    .. math::

        H(z) \sim \sum_{k = 0}^{k_{max}} h_k z^{-(1 - a_1 + k) / \alpha_1},

    generated by the first right pole family. Entries where a reciprocal
    Gamma factor cancels the pole are exactly zero.
    """
    if spec.n < 1:
        raise ValueError("spec has no right poles")
    if policy is None:
        policy = DEFAULT_POLICY

    factors = _factors(spec)
    a, A = spec.upper[0]
    h = np.zeros(kmax + 1)
    for k in range(kmax + 1):
        s0 = (1.0 - a + k) / A
        lau = _laurent(factors, s0, 0, policy.collision_eps)
        if lau.order <= 0:
            continue
        if lau.order > 1:
            raise ValueError(f"pole at s = {s0} has order {lau.order}")
        h[k] = -lau.sign * math.exp(lau.log_mag)

    return h


# }}}


# {{{ residue series


def _as_array(z):
    z = np.asarray(z, dtype=np.float64)
    if np.any(~(z > 0)):
        raise ValueError("Fox H-functions are evaluated for z > 0 only")
    return z


def _pack(value, err, shape):
    if shape == ():
        return float(value[0]), float(err[0])
    return value.reshape(shape), err.reshape(shape)


def eval_small(spec: FoxHSpec, z, policy: EvalPolicy | None = None):
    """Sum of the residues at the left poles.

    :returns: ``(value, err_est)``.
    :raises OutOfConvergenceRegion: if the series diverges at *z*, i.e. for
        :math:`\\mu < 0`, or :math:`\\mu = 0` and :math:`z \\ge 0.9 \\delta`.
    :raises NoConvergence: if ``policy.tol.max_terms`` terms do not suffice.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    tol = policy.tol

    z = _as_array(z)
    shape = z.shape
    z = z.ravel()

    mu = spec.mu
    if mu < -1.0e-12:
        raise OutOfConvergenceRegion("left residue series diverges for mu < 0")
    if abs(mu) <= 1.0e-12 and np.any(z >= 0.9 * spec.delta):
        raise OutOfConvergenceRegion(
            f"left residue series needs z < 0.9 delta = {0.9 * spec.delta:.6g}"
        )

    logz = np.log(z)
    count = 64
    while True:
        table = _laurent_table(spec, "left", count, policy.collision_eps)
        total = np.zeros_like(z)
        scale = np.zeros_like(z)
        small_run = np.zeros(z.shape, dtype=int)
        last = np.zeros_like(z)
        for _, lau in table:
            if lau.order <= 0:
                continue
            term = _residue(lau, logz)
            total += term
            scale = np.maximum(scale, np.abs(term))
            small = np.abs(term) <= tol.abs_tol + tol.rel_tol * np.abs(total)
            small_run = np.where(small, small_run + 1, 0)
            last = np.abs(term)
            if np.all(small_run >= 3):
                err = last + 16 * np.finfo(float).eps * scale
                return _pack(total, err, shape)

        if count >= tol.max_terms:
            raise NoConvergence(
                f"left residue series did not converge in {count} poles"
            )
        count = min(2 * count, tol.max_terms)


def _right_terms(spec: FoxHSpec, logz, count: int, eps: float):
    table = _laurent_table(spec, "right", count, eps)
    locs = [lau.location for _, lau in table if lau.order > 0]
    terms = [-_residue(lau, logz) for _, lau in table if lau.order > 0]
    return locs, terms


def eval_large(spec: FoxHSpec, z, policy: EvalPolicy | None = None):
    """Expansion at infinity: minus the sum of the residues at the right
    poles, truncated before the smallest term.

    The error estimate is the larger of the first omitted term and a bound
    on the remaining Mellin-Barnes integral.

    :returns: ``(value, err_est)``.
    :raises AsymptoticUnreliable: if the error estimate exceeds
        ``policy.tol.rel_tol`` times a nonzero value.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    tol = policy.tol

    z = _as_array(z)
    shape = z.shape
    z = z.ravel()
    logz = np.log(z)

    count = 64
    locs, terms = _right_terms(spec, logz, count, policy.collision_eps)

    value = np.zeros_like(z)
    omitted = np.zeros_like(z)
    # index of the first omitted pole, per z
    stop = np.full(z.shape, len(terms), dtype=int)
    active = np.ones(z.shape, dtype=bool)
    best = np.full_like(z, np.inf)
    for k, term in enumerate(terms):
        mag = np.nan_to_num(np.abs(term), nan=np.inf)
        growing = active & (mag > best)
        with np.errstate(invalid="ignore", over="ignore"):
            converged = active & (mag <= 0.01 * (tol.abs_tol + tol.rel_tol * np.abs(value)))
        ending = growing | converged
        omitted = np.where(ending, mag, omitted)
        stop = np.where(ending, k, stop)
        active &= ~ending

        value = np.where(active, value + term, value)
        best = np.where(active, np.minimum(best, mag), best)

    bound = _remainder_bound(spec, logz, locs, stop, policy)
    err = np.maximum(omitted, bound)

    with np.errstate(invalid="ignore"):
        bad = (value != 0) & ~(err <= tol.rel_tol * np.abs(value))
    if np.any(bad):
        raise AsymptoticUnreliable(
            "expansion at infinity is unreliable at z = "
            f"{z[bad].min():.6g} (estimated error {err[bad].max():.3e})"
        )

    return _pack(value, err, shape)


def eval_small_inverted(spec: FoxHSpec, z, policy: EvalPolicy | None = None):
    """Small-argument expansion from the right poles of :math:`\\mathcal{H}(-s)`,
    i.e. the expansion at infinity of the swapped spec at :math:`1/z`.

    This is the route used when the left residue series diverges
    (:math:`\\mu < 0`).
    """
    z = _as_array(z)
    return eval_large(spec.swapped(), 1.0 / z, policy)


# }}}


# {{{ contour integration

# trapezoidal rule target: exp(-_TRAP_EXPONENT) relative discretization error
_TRAP_EXPONENT = 40.0
# log-magnitude drop used to truncate the integration line
_TAIL_DROP = 46.0
_MAX_ETA = 1.5


@dataclass(frozen=True)
class _Line:
    c: float
    eta: float
    log_mass: float


@lru_cache(maxsize=256)
def _singular_points(spec: FoxHSpec, count: int, eps: float) -> np.ndarray:
    # every pole of every Gamma factor, inside the range where each family
    # has been enumerated
    factors = _factors(spec)
    lo, hi = -np.inf, np.inf
    pts = []
    for f in factors:
        fam = np.array([(-l - f.offset) / f.slope for l in range(count)])
        pts.append(fam)
        if f.slope > 0:
            lo = max(lo, fam[-1])
        else:
            hi = min(hi, fam[-1])

    pts = np.sort(np.concatenate(pts))
    pts = pts[(pts >= lo) & (pts <= hi)]
    keep = np.concatenate([[True], np.diff(pts) > eps * np.maximum(1.0, np.abs(pts[1:]))])
    pts = pts[keep]

    # a side without any singularity gets sparse virtual points, so that
    # lines far out (where the function is exponentially small) are tried
    far = 2.0 ** np.arange(0.0, 11.0, 0.25)
    if hi == np.inf:
        pts = np.concatenate([pts, pts[-1] + far])
    if lo == -np.inf:
        pts = np.concatenate([pts[0] - far[::-1], pts])
    return pts


def _line_extent(factors, c: float) -> float:
    ys = np.concatenate([[0.0], 2.0 ** np.arange(-2, 14)])
    logmag = _log_kernel(factors, c + 1j * ys).real
    peak = np.max(logmag)
    below = np.nonzero((logmag < peak - _TAIL_DROP) & (ys > ys[np.argmax(logmag)]))[0]
    if below.size == 0:
        raise OutOfConvergenceRegion(
            f"Mellin kernel does not decay along Re s = {c:.6g}"
        )
    return float(ys[below[0]])


@lru_cache(maxsize=256)
def _candidate_lines(spec: FoxHSpec, eps: float) -> tuple[_Line, ...]:
    if spec.a_star <= 0:
        raise OutOfConvergenceRegion(
            f"Mellin-Barnes integral diverges (a* = {spec.a_star:.6g} <= 0)"
        )

    factors = _factors(spec)
    pts = _singular_points(spec, 64, eps)
    mids = 0.5 * (pts[1:] + pts[:-1])
    etas = 0.5 * np.diff(pts)

    # lines may only cross residues that are tabulated
    left = _laurent_table(spec, "left", 64, eps)
    right = _laurent_table(spec, "right", 64, eps)
    lo = hi = None
    if any(f.power > 0 and f.slope > 0 for f in factors):
        lo = left[-1][0].location
    if any(f.power > 0 and f.slope < 0 for f in factors):
        hi = right[-1][0].location
    lo = -np.inf if lo is None else lo
    hi = np.inf if hi is None else hi
    inside = (mids > lo) & (mids < hi)
    mids, etas = mids[inside], etas[inside]

    lines = []
    u = np.linspace(0.0, 1.0, 257)
    for c, eta in zip(mids, etas):
        ymax = _line_extent(factors, c)
        # sinh-spaced nodes resolve the peak of width ~eta near y = 0
        umax = np.arcsinh(ymax / eta)
        y = eta * np.sinh(u * umax)
        dy = eta * np.cosh(u * umax) * umax * (u[1] - u[0])
        logf = _log_kernel(factors, c + 1j * y).real + np.log(dy)
        logf[[0, -1]] -= np.log(2.0)
        log_mass = math.log(2.0) + float(special.logsumexp(logf))
        lines.append(_Line(float(c), float(eta), log_mass))

    return tuple(lines)


@lru_cache(maxsize=512)
def _line_nodes(spec: FoxHSpec, c: float, h: float):
    factors = _factors(spec)
    ymax = _line_extent(factors, c)
    y = np.arange(0.0, ymax + h, h)
    return y, _log_kernel(factors, c + 1j * y)


def _residue_logmag(table, logz):
    return np.array(
        [
            np.log(np.abs(_residue(lau, logz)) + 1.0e-300)
            for _, lau in table
            if lau.order > 0
        ]
    ).reshape(-1, logz.size)


def _line_costs(spec: FoxHSpec, logz, eps: float):
    """Log of the magnitude scale of each candidate line at every *z*: the
    larger of the integral itself and the residues crossed to reach it."""
    lines = _candidate_lines(spec, eps)
    cs = np.array([ln.c for ln in lines])
    etas = np.array([ln.eta for ln in lines])
    log_mass = np.array([ln.log_mass for ln in lines])

    integral = log_mass[:, None] - cs[:, None] * logz[None, :] - math.log(2 * math.pi)

    left = [(lau.location) for _, lau in _laurent_table(spec, "left", 64, eps) if lau.order > 0]
    right = [(lau.location) for _, lau in _laurent_table(spec, "right", 64, eps) if lau.order > 0]
    lmag = _residue_logmag(_laurent_table(spec, "left", 64, eps), logz)
    rmag = _residue_logmag(_laurent_table(spec, "right", 64, eps), logz)

    crossed = np.full_like(integral, -np.inf)
    for k, c in enumerate(cs):
        lsel = np.array([loc > c for loc in left], dtype=bool)
        rsel = np.array([loc < c for loc in right], dtype=bool)
        if lsel.any():
            crossed[k] = np.maximum(crossed[k], lmag[lsel].max(axis=0))
        if rsel.any():
            crossed[k] = np.maximum(crossed[k], rmag[rsel].max(axis=0))

    # lines close to a pole need many nodes; mildly prefer the others
    penalty = 3.0 * np.maximum(0.0, np.log(0.05 / etas))
    return lines, np.maximum(integral, crossed) + penalty[:, None], integral


def _remainder_bound(spec, logz, locs, stop, policy):
    """Bound :math:`z^{-c} / (2 \\pi) \\int |\\mathcal{H}(c + iy)| dy` for a
    line between the last included and the first omitted right pole."""
    try:
        lines = _candidate_lines(spec, policy.collision_eps)
    except OutOfConvergenceRegion:
        return np.full(logz.shape, np.inf)

    cs = np.array([ln.c for ln in lines])
    log_mass = np.array([ln.log_mass for ln in lines])
    locs = np.array(locs + [np.inf])
    sep = max(
        [lau.location for _, lau in _laurent_table(spec, "left", 1, policy.collision_eps)]
        or [-np.inf]
    )

    bound = np.full(logz.shape, np.inf)
    for k in np.unique(stop):
        lo = locs[k - 1] if k > 0 else sep
        hi = locs[k]
        sel = (cs > lo) & (cs < hi)
        if not sel.any():
            continue
        mask = stop == k
        val = log_mass[sel][:, None] - cs[sel][:, None] * logz[None, mask]
        bound[mask] = np.exp(val.min(axis=0)) / (2 * math.pi)

    return bound


def _trapezoid(spec: FoxHSpec, c: float, h: float, lz):
    # trapezoidal sums with steps h and 2h
    y, logk = _line_nodes(spec, c, h)
    w = np.full(y.size, h)
    w[0] = h / 2
    w2 = np.where(np.arange(y.size) % 2 == 0, 2 * h, 0.0)
    w2[0] = h

    fine = np.empty(lz.size)
    coarse = np.empty(lz.size)
    for start in range(0, lz.size, 256):
        sl = slice(start, start + 256)
        f = np.exp(logk[None, :] - (c + 1j * y[None, :]) * lz[sl, None]).real
        fine[sl] = f @ w / math.pi
        coarse[sl] = f @ w2 / math.pi

    return fine, coarse


def eval_contour(spec: FoxHSpec, z, policy: EvalPolicy | None = None):
    r"""Evaluate by trapezoidal integration along :math:`\Re s = c`,

    .. math::

        H(z) = \frac{1}{\pi} \int_0^\infty
            \Re\left[\mathcal{H}(c + iy) z^{-c - iy}\right] \mathrm{d}y
        + \sum_{s_\ell > c} \operatorname{Res}_{s_\ell}
        - \sum_{s_k < c} \operatorname{Res}_{s_k},

    where the line is chosen per *z* to minimise the magnitude of the
    integrand and of the crossed left (:math:`s_\ell`) and right
    (:math:`s_k`) residues, so that no cancellation takes place.

    :returns: ``(value, err_est)``.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    eps = policy.collision_eps

    z = _as_array(z)
    shape = z.shape
    z = z.ravel()
    logz = np.log(z)

    lines, costs, _ = _line_costs(spec, logz, eps)
    choice = np.argmin(costs, axis=0)

    left = [lau for _, lau in _laurent_table(spec, "left", 64, eps) if lau.order > 0]
    right = [lau for _, lau in _laurent_table(spec, "right", 64, eps) if lau.order > 0]

    value = np.empty_like(z)
    err = np.empty_like(z)
    for k in np.unique(choice):
        mask = choice == k
        line = lines[k]
        lz = logz[mask]

        eta = min(line.eta, _MAX_ETA)
        h = 2 * math.pi * eta / (_TRAP_EXPONENT + eta * np.abs(lz).max())
        # snap to a power-of-two fraction so that nodes are reused
        h = 2.0 ** math.floor(math.log2(h))

        integral, coarse = _trapezoid(spec, line.c, h, lz)
        scale = np.exp(line.log_mass - line.c * lz) / math.pi
        for _ in range(4):
            unresolved = np.abs(integral - coarse) > 1.0e-8 * scale
            if not unresolved.any():
                break
            h /= 2
            integral[unresolved], coarse[unresolved] = _trapezoid(
                spec, line.c, h, lz[unresolved]
            )

        residues = np.zeros(lz.size)
        res_scale = np.zeros(lz.size)
        for lau in left:
            if lau.location > line.c:
                r = _residue(lau, lz)
                residues += r
                res_scale = np.maximum(res_scale, np.abs(r))
        for lau in right:
            if lau.location < line.c:
                r = _residue(lau, lz)
                residues -= r
                res_scale = np.maximum(res_scale, np.abs(r))

        scale = scale + res_scale
        diff = np.abs(integral - coarse)
        value[mask] = integral + residues
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(scale > 0, diff / scale, 1.0)
        err[mask] = 64 * np.finfo(float).eps * scale + diff * np.minimum(1.0, rel)

    return _pack(value, err, shape)


# }}}


# {{{ dispatch


def evaluate(spec: FoxHSpec, z, policy: EvalPolicy | None = None):
    """Evaluate with the residue series where they are accurate and fall back
    to contour integration elsewhere.

    Below ``policy.crossover_z`` the left residue series is tried, above it
    the expansion at infinity; any point whose error estimate misses the
    tolerance is recomputed by :func:`eval_contour`, and the estimate with
    the smaller error is reported.

    :returns: ``(value, err_est)``.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    tol = policy.tol

    z = _as_array(z)
    shape = z.shape
    z = z.ravel()

    value = np.full_like(z, np.nan)
    err = np.full_like(z, np.inf)

    small = z <= policy.crossover_z
    mu = spec.mu
    series_ok = mu > 1.0e-12 or (abs(mu) <= 1.0e-12)
    if series_ok and small.any():
        zs = z[small]
        if abs(mu) <= 1.0e-12:
            zs = np.where(zs < 0.9 * spec.delta, zs, np.nan)
        ok = ~np.isnan(zs)
        if ok.any():
            try:
                v, e = eval_small(spec, zs[ok], policy)
                idx = np.nonzero(small)[0][ok]
                value[idx], err[idx] = v, e
            except NoConvergence:
                pass

    large = ~small
    if large.any() and spec.n > 0:
        no_raise = replace(policy, tol=replace(tol, rel_tol=np.inf))
        v, e = eval_large(spec, z[large], no_raise)
        value[large], err[large] = v, e

    target = tol.abs_tol + tol.rel_tol * np.abs(value)
    # a vanishing expansion only bounds the value, so it is always refined
    redo = ~(err <= target) | (value == 0)
    if redo.any():
        v, e = eval_contour(spec, z[redo], policy)
        better = ~(err[redo] <= e)
        idx = np.nonzero(redo)[0][better]
        value[idx], err[idx] = v[better], e[better]

    return _pack(value, err, shape)


def eval(spec: FoxHSpec, z, policy: EvalPolicy | None = None):  # noqa: A001
    """Value of the Fox H-function at *z* (scalar or array)."""
    return evaluate(spec, z, policy)[0]


# }}}


# {{{ standard specs


def mittag_leffler_spec(alpha: float, beta: float) -> FoxHSpec:
    r""":math:`E_{\alpha, \beta}(-z) = H^{1, 1}_{1, 2}\left[z \,\middle|\,
    \begin{matrix} (0, 1) \\ (0, 1), (1 - \beta, \alpha) \end{matrix}\right]`."""
    return FoxHSpec(m=1, n=1, upper=((0.0, 1.0),), lower=((0.0, 1.0), (1.0 - beta, alpha)))


# }}}

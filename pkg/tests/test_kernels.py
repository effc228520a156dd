from __future__ import annotations

import math

import numpy as np
import pytest

from fracflow import kernels
from fracflow.errors import SingularAtOrigin
from fracflow.kernels import FracParams, KernelKind, Unbounded

# beta = 2, d = 1: Z = t^(-a/2) M_{a/2}(r t^(-a/2)) / 2 with the M-Wright
# function, summed in 200-digit arithmetic (mpmath)
MWRIGHT_ORACLE = [
    (0.5, 1.0, 0.5, 0.28398440942038478813),
    (0.5, 1.0, 2.0, 0.080625541727292927953),
    (0.5, 2.0, 1.0, 0.18322183050288337814),
    (0.5, 0.5, 3.0, 0.020641417296158990313),
    (0.8, 1.0, 0.5, 0.27333194066484792571),
    (0.8, 1.0, 2.0, 0.092791137255054575387),
    (0.8, 2.0, 1.0, 0.1803793336830917139),
    (0.8, 0.5, 3.0, 0.012379283231153097477),
]

# alpha = 1, d = 1: symmetric stable densities (1/pi) int cos(k r) exp(-t k^beta) dk
# by 40-digit quadrature (mpmath)
STABLE_ORACLE = [
    (0.8, 1.0, 0.5, 0.23721505016093920651),
    (0.8, 1.0, 2.0, 0.054937556084454669515),
    (0.8, 2.0, 1.0, 0.10983511345996330014),
    (1.5, 1.0, 0.5, 0.26229684035409003579),
    (1.5, 1.0, 2.0, 0.084539623126137520057),
    (1.5, 2.0, 1.0, 0.15677083664852323284),
]


@pytest.mark.parametrize(("alpha", "t", "r", "expected"), MWRIGHT_ORACLE)
def test_z_matches_m_wright(alpha, t, r, expected):
    assert kernels.z_kernel(FracParams(alpha, 2.0, 1), t, r) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize(("beta", "t", "r", "expected"), STABLE_ORACLE)
def test_z_matches_stable_density(beta, t, r, expected):
    assert kernels.z_kernel(FracParams(1.0, beta, 1), t, r) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_gaussian_and_cauchy(d):
    t = np.array([0.1, 0.5, 1.0, 3.0, 10.0])
    r = np.array([0.0, 0.3, 1.0, 2.0, 7.0])
    gauss = (4 * np.pi * t) ** (-d / 2) * np.exp(-(r**2) / (4 * t))
    np.testing.assert_allclose(kernels.z_kernel(FracParams(1.0, 2.0, d), t, r), gauss, rtol=1e-10)
    c = math.gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)
    cauchy = c * t / (t**2 + r**2) ** ((d + 1) / 2)
    if d == 1:
        r = r.copy()
        r[0] = 0.0
    got = kernels.z_kernel(FracParams(1.0, 1.0, d), t[1:], r[1:])
    np.testing.assert_allclose(got, cauchy[1:], rtol=1e-10)


def test_y_equals_z_for_classical_time():
    p = FracParams(1.0, 1.5, 2)
    r = np.array([0.2, 1.0, 4.0])
    np.testing.assert_array_equal(kernels.y_kernel(p, 1.5, r), kernels.z_kernel(p, 1.5, r))


def test_self_similarity():
    p = FracParams(0.6, 1.3, 1)
    t, r, lam = 0.7, np.array([0.1, 1.0, 5.0]), 3.0
    # Z(lam t, lam^(a/b) r) = lam^(-a d/b) Z(t, r)
    s = lam ** (p.alpha / p.beta)
    np.testing.assert_allclose(
        kernels.z_kernel(p, lam * t, s * r), lam ** (-p.alpha / p.beta) * kernels.z_kernel(p, t, r),
        rtol=1e-11,
    )


def test_origin_values_and_singularities():
    p = FracParams(0.5, 1.5, 1)
    # Z(0) - Z(r) ~ r^(beta - d)
    near = kernels.z_kernel(p, 1.0, 1e-12)
    assert kernels.z_kernel(p, 1.0, 0.0) == pytest.approx(near, rel=1e-5)
    with pytest.raises(SingularAtOrigin):
        kernels.z_kernel(FracParams(0.5, 1.0, 1), 1.0, 0.0)
    with pytest.raises(SingularAtOrigin):
        kernels.y_kernel(FracParams(0.5, 1.0, 2), 1.0, 0.0)
    yp = FracParams(0.5, 1.5, 2)
    assert kernels.y_kernel(yp, 1.0, 0.0) == pytest.approx(kernels.y_kernel(yp, 1.0, 1e-5), rel=1e-3)
    with pytest.raises(SingularAtOrigin):
        kernels.z_gradient_norm(p, 1.0, 0.0)
    with pytest.raises(ValueError):
        kernels.z_kernel(p, 0.0, 1.0)


def test_gradient_matches_finite_difference():
    p = FracParams(0.6, 1.2, 2)
    r, h = np.array([0.3, 1.0, 3.0]), 1e-5
    fd = (kernels.z_kernel(p, 1.0, r + h) - kernels.z_kernel(p, 1.0, r - h)) / (2 * h)
    np.testing.assert_allclose(kernels.z_gradient_norm(p, 1.0, r), np.abs(fd), rtol=1e-6)
    fd = (kernels.y_kernel(p, 1.0, r + h) - kernels.y_kernel(p, 1.0, r - h)) / (2 * h)
    np.testing.assert_allclose(kernels.y_gradient_norm(p, 1.0, r), np.abs(fd), rtol=1e-6)
    fd = (kernels.y_kernel(p, 1.0 + h, r) - kernels.y_kernel(p, 1.0 - h, r)) / (2 * h)
    np.testing.assert_allclose(kernels.y_time_derivative(p, 1.0, r), np.abs(fd), rtol=1e-6)

    x = np.array([[0.6, -0.8]])
    g = kernels.z_gradient(p, 1.0, x)
    assert g.shape == (1, 2)
    np.testing.assert_allclose(np.linalg.norm(g), kernels.z_gradient_norm(p, 1.0, 1.0))
    assert g[0, 0] < 0 < g[0, 1]


def test_fourier_transforms():
    p = FracParams(0.5, 1.0, 1)
    assert kernels.z_hat(p, 1.0, 0.0) == pytest.approx((2 * np.pi) ** -0.5)
    assert kernels.y_hat(p, 4.0, 0.0) == pytest.approx((2 * np.pi) ** -0.5 * 4.0**-0.5 / math.gamma(0.5))


@pytest.mark.parametrize(("alpha", "beta", "d"), [(0.3, 0.6, 1), (0.5, 1.0, 2), (0.8, 2.0, 1), (1.0, 1.5, 2)])
def test_mass_is_one(alpha, beta, d):
    assert kernels.kernel_mass(FracParams(alpha, beta, d)) == pytest.approx(1.0, abs=1e-8)


def test_self_similar_profile_matches_fox():
    p = FracParams(0.5, 1.5, 1)
    prof = kernels.SelfSimilarProfile(p)
    r = np.array([0.0, 0.01, 0.7, 3.0, 50.0])
    for t in (1.0, 30.0):
        np.testing.assert_allclose(prof(t, r), kernels.z_kernel(p, t, r), rtol=1e-7)
    with pytest.raises(SingularAtOrigin):
        kernels.SelfSimilarProfile(FracParams(0.5, 1.0, 1)).profile(0.0)


def test_envelope_branches():
    p = FracParams(0.5, 1.0, 1)
    assert kernels.asymptotic_envelope("Z", p, 1.0, 0.5).branch == "Z-small-log"
    assert kernels.asymptotic_envelope("Z", p, 1.0, 5.0).branch == "Z-large"
    q = FracParams(0.5, 2.0, 1)
    assert kernels.asymptotic_envelope("Z", q, 1.0, 5.0).branch == "Z-large-upper"
    assert kernels.asymptotic_envelope("Z", q, 1.0, 0.1).branch == "Z-small-regular"
    br = kernels.asymptotic_envelope(KernelKind.dtY, FracParams(0.7, 1.0, 3), 1.0, 0.1).branch
    assert br == "dtY-small:Y-small-singular"
    with pytest.raises(SingularAtOrigin):
        kernels.asymptotic_envelope("Z", p, 1.0, 0.0)


def test_envelopes_track_kernels():
    from fracflow.acceptance import envelope_ratio

    assert envelope_ratio("Z", FracParams(0.5, 1.5, 1), "large")[0] < 10
    assert envelope_ratio("Y", FracParams(0.7, 1.0, 2), "small")[0] < 10


def test_kappa_thresholds_and_lp_bounds():
    p = FracParams(0.5, 1.5, 1)
    k = kernels.kappa_thresholds(p)
    assert k.kappa1 == pytest.approx(2.0)
    assert k.kappa2 == math.inf and k.kappa3 == math.inf

    q = FracParams(0.5, 1.0, 2)
    k = kernels.kappa_thresholds(q)
    assert k.kappa3 == 2.0
    assert kernels.kernel_lp_bound("Z", q, 1.5, 4.0) == pytest.approx(4.0 ** (-(1.0) * (1 - 1 / 1.5)))
    at = kernels.kernel_lp_bound("Z", q, 2.0, 4.0)
    assert isinstance(at, Unbounded) and at.weak_envelope == pytest.approx(4.0**-0.5)
    above = kernels.kernel_lp_bound("Z", q, 3.0, 4.0)
    assert isinstance(above, Unbounded) and above.weak_envelope is None
    # the heat kernel lies in every L^p
    assert not isinstance(kernels.kernel_lp_bound("Z", FracParams(1.0, 1.0, 2), 5.0, 1.0), Unbounded)


def test_params_validation_and_snapping():
    with pytest.raises(ValueError):
        FracParams(1.5, 1.0, 1)
    with pytest.raises(ValueError):
        FracParams(0.5, 2.5, 1)
    with pytest.raises(ValueError):
        FracParams(0.5, 1.0, 0)
    p = FracParams(0.5, 1.0 + 1e-12, 2)
    assert p.beta == 1.0 and p.d_eq_2beta
    assert FracParams(1.0 - 1e-12, 1.0, 1).classical_time

from __future__ import annotations

import math

import numpy as np
import pytest

from fracflow import kernels, spectral
from fracflow.errors import GridTooCoarse, QuadratureUnderResolved
from fracflow.kernels import FracParams
from fracflow.special import mittag_leffler
from fracflow.spectral import Field, ForcingSchedule, SpectralGrid


def test_grid_layout():
    g = SpectralGrid(1, 64, 8.0)
    assert g.h == 0.25 and g.coords[0] == -8.0 and g.coords[g.origin_index] == 0.0
    g2 = SpectralGrid(2, 32, 4.0)
    assert g2.shape == (32, 32) and g2.cell_volume == 0.25**2
    assert g2.frequency_norm().shape == (32, 17)
    with pytest.raises(ValueError):
        SpectralGrid(1, 100, 8.0)
    with pytest.raises(ValueError):
        SpectralGrid(3, 64, 8.0)


def test_plancherel_and_round_trip():
    rng = np.random.default_rng(1)
    for d in (1, 2):
        g = SpectralGrid(d, 64, 5.0)
        u = rng.standard_normal(g.shape)
        np.testing.assert_allclose(g.inverse(g.forward(u)), u, atol=1e-13)
        full = np.fft.fftn(u)
        assert np.sum(np.abs(full) ** 2) / u.size == pytest.approx(np.sum(u**2), rel=1e-10)


def test_heat_kernel_from_hot_cell():
    g = SpectralGrid(1, 256, 20.0)
    (u,) = spectral.solve_homogeneous(FracParams(1.0, 2.0, 1), Field.hot_cell(g), [1.0])
    np.testing.assert_allclose(u.values, np.exp(-g.coords**2 / 4) / math.sqrt(4 * math.pi), atol=1e-14)


@pytest.mark.parametrize("d", [1, 2])
def test_mass_conservation(d):
    p = FracParams(0.5, 1.2, d)
    g = SpectralGrid(d, 128 if d == 2 else 1024, 40.0)
    u0 = Field.gaussian(g, 1.0, mass=2.5)
    masses = [spectral.moments(u)[0] for u in spectral.solve_homogeneous(p, u0, [1.0, 5.0, 20.0])]
    np.testing.assert_allclose(masses, 2.5, atol=1e-8)


def test_solution_matches_kernel():
    p = FracParams(0.6, 1.5, 1)
    g = SpectralGrid(1, 4096, 400.0)
    (u,) = spectral.solve_homogeneous(p, Field.hot_cell(g), [2.0])
    idx = (np.abs(g.coords) >= 0.5) & (np.abs(g.coords) <= 5.0)
    ref = kernels.z_kernel(p, 2.0, np.abs(g.coords[idx]))
    # a hot cell differs from a delta by O(h^2) away from the cusp at 0
    np.testing.assert_allclose(u.values[idx], ref, rtol=5e-3)


def test_semigroup_fails_only_with_memory():
    g = SpectralGrid(1, 512, 40.0)
    u0 = Field.gaussian(g, 1.0)
    for alpha, broken in ((0.5, True), (1.0, False)):
        p = FracParams(alpha, 1.5, 1)
        u1, u2 = spectral.solve_homogeneous(p, u0, [1.0, 2.0])
        gap = np.max(np.abs(spectral.propagate(p, u1, 1.0).values - u2.values))
        assert bool(gap > 1e-3) is broken
        if not broken:
            assert gap < 1e-12


def test_grid_too_coarse():
    p = FracParams(0.5, 1.0, 1)
    g = SpectralGrid(1, 64, 4.0)
    with pytest.raises(GridTooCoarse):
        spectral.solve_homogeneous(p, Field.gaussian(g), [1.0e4])
    spectral.solve_homogeneous(p, Field.gaussian(g), [1.0e4], min_relaxation=0.0)
    assert spectral.tail_mass_radius(p, 1.0) > 1.0e3


def test_ml_decay_table():
    x = np.geomspace(1e-7, 1e15, 5000) * 1.2345
    for a, b in ((0.5, 1.0), (0.3, 1.0), (0.8, 1.8)):
        np.testing.assert_allclose(spectral.ml_decay(a, b, x), mittag_leffler(a, b, -x), rtol=1e-10)


def test_forced_constant_source():
    # f(t, x) = phi(x): u_hat = phi_hat t^a E_{a, a+1}(-lam t^a)
    p = FracParams(0.5, 1.0, 1)
    g = SpectralGrid(1, 1024, 50.0)
    phi = np.exp(-g.coords**2)
    forcing = ForcingSchedule.separable(g, [0.0, 5.0, 10.0, 20.0], lambda x: np.exp(-x**2),
                                        lambda t: np.ones_like(t))
    out = spectral.solve_forced(p, Field(g, np.zeros(g.shape)), forcing, [3.0, 20.0])
    lam = g.frequency_norm() ** p.beta
    for u in out:
        t = u.time
        exact = g.inverse(g.forward(phi) * t**0.5 * mittag_leffler(0.5, 1.5, -lam * t**0.5))
        np.testing.assert_allclose(u.values, exact, atol=1e-12)


def test_forced_refinement_and_resolution_check():
    p = FracParams(0.7, 1.5, 1)
    g = SpectralGrid(1, 256, 30.0)
    u0 = Field(g, np.zeros(g.shape))

    def run(n, **kw):
        times = np.linspace(0.0, 4.0, n + 1)
        forcing = ForcingSchedule.separable(
            g, times, lambda x: np.exp(-x**2), lambda t: np.cos(3 * t), gamma=0.0)
        return spectral.solve_forced(p, u0, forcing, [4.0], **kw)[0].values

    ref = run(1024, rel_tol=1.0)
    e1 = np.max(np.abs(run(32, rel_tol=1.0) - ref))
    e2 = np.max(np.abs(run(64, rel_tol=1.0) - ref))
    assert e2 < 0.6 * e1  # at least first order in the sample spacing
    with pytest.raises(QuadratureUnderResolved):
        run(8)


def test_forcing_schedule():
    g = SpectralGrid(1, 32, 4.0)
    f = ForcingSchedule.separable(g, [0.0, 1.0, 3.0], lambda x: np.ones_like(x), lambda t: t)
    np.testing.assert_allclose(f.at(2.0), 2.0)
    np.testing.assert_allclose(f.at(10.0), 3.0)
    with pytest.raises(ValueError):
        ForcingSchedule(g, [0.5, 1.0], np.zeros((2, 32)))
    with pytest.raises(ValueError):
        ForcingSchedule(g, [0.0, 0.0], np.zeros((2, 32)))
    assert np.all(ForcingSchedule.zero(g, 5.0).at(2.0) == 0)


@pytest.mark.parametrize(("alpha", "beta"), [(0.5, 1.0), (0.3, 1.5), (0.8, 2.0)])
def test_residual_first_order(alpha, beta):
    from fracflow.acceptance import residual_order

    order, res = residual_order(FracParams(alpha, beta, 1))
    assert order >= 0.8
    assert res[-1] < res[0]


def test_residual_requires_uniform_snapshots():
    p = FracParams(0.5, 1.0, 1)
    g = SpectralGrid(1, 64, 10.0)
    u0 = Field.gaussian(g)
    sols = spectral.solve_homogeneous(p, u0, np.linspace(0.1, 1.0, 10))
    with pytest.raises(ValueError):
        spectral.residual(p, sols)


def test_moments():
    g = SpectralGrid(2, 64, 10.0)
    u = Field.gaussian(g, 0.7, mass=3.0, center=(1.0, -2.0))
    mass, first = spectral.moments(u)
    assert mass == pytest.approx(3.0, rel=1e-12)
    np.testing.assert_allclose(first, [3.0, -6.0], rtol=1e-10)
    g1 = SpectralGrid(1, 256, 10.0)
    assert spectral.absolute_moment(Field.gaussian(g1, 1.0)) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-3)


@pytest.mark.parametrize(("alpha", "beta", "d"), [(0.6, 1.4, 1), (0.5, 1.0, 2), (0.7, 1.5, 3)])
def test_radial_profile_matches_kernel(alpha, beta, d):
    p = FracParams(alpha, beta, d)
    r = np.array([0.5, 1.0, 3.0])
    prof = spectral.radial_profile_from_hat(p, 1.0, r)
    np.testing.assert_allclose(prof.values, kernels.z_kernel(p, 1.0, r), rtol=1e-7)

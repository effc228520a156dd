from __future__ import annotations

import math

import numpy as np
import pytest

from fracflow import gridsolver
from fracflow.errors import KernelBoundViolation
from fracflow.gridsolver import KernelSpec, assemble_operator, evolve, solve_comparison_ode
from fracflow.kernels import FracParams
from fracflow.norms import NormSeries, fit_rate
from fracflow.spectral import Field, SpectralGrid


def test_fractional_laplacian_constant():
    # beta = 1, d = 1: C = 1/pi;  beta = 1, d = 2: C = 1/(2 pi)
    assert gridsolver.fractional_laplacian_constant(1, 1.0) == pytest.approx(1 / math.pi)
    assert gridsolver.fractional_laplacian_constant(2, 1.0) == pytest.approx(1 / (2 * math.pi))


def test_kernel_spot_checks():
    k = KernelSpec.perturbed(1, 1.0, 0.5, seed=3)
    x = np.array([[0.3], [4.2]])
    y = np.array([[-1.7], [0.1]])
    np.testing.assert_array_equal(k(x, y), k(y, x))
    with pytest.raises(KernelBoundViolation):
        KernelSpec(1.0, 1.0, 1.0, lambda x, y: 2 * np.linalg.norm(x - y, axis=-1) ** -2.0)
    with pytest.raises(KernelBoundViolation):
        KernelSpec(1.0, 0.5, 2.0, lambda x, y: np.linalg.norm(x - y, axis=-1) ** -2.0 * (1 + 0.5 * np.tanh(x[:, 0])))
    with pytest.raises(ValueError):
        KernelSpec.perturbed(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        KernelSpec(2.0, 1.0, 1.0, lambda x, y: 0 * x[:, 0])


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.5])
def test_operator_symbol(beta):
    g = SpectralGrid(1, 2048, 64.0)
    op = assemble_operator(KernelSpec.fractional_laplacian(1, beta), g)
    mid = slice(900, 1100)
    for xi in (0.5, 1.0, 2.0):
        u = np.sin(xi * g.coords)
        big = np.abs(u[mid]) > 0.5
        ratio = np.median(op.apply(u)[mid][big] / u[mid][big])
        assert ratio == pytest.approx(xi**beta, rel=2e-3)


def test_operator_symmetric_and_positive():
    g = SpectralGrid(1, 128, 16.0)
    op = assemble_operator(KernelSpec.perturbed(1, 1.2, 0.5, seed=1), g)
    m = op.matrix
    np.testing.assert_allclose(m, m.T, atol=1e-14)
    assert np.linalg.eigvalsh(m).min() > 0
    # constants only feel the far field
    np.testing.assert_allclose(op.apply(np.ones(128)), op.far, atol=1e-10)


def test_operator_2d_symbol():
    g = SpectralGrid(2, 32, 8.0)
    op = assemble_operator(KernelSpec.fractional_laplacian(2, 1.0), g)
    X, _ = g.mesh()
    u = np.cos(np.pi / 2 * X).ravel()
    Lu = op.apply(u).reshape(g.shape)
    c = Lu[12:20, 12:20] / u.reshape(g.shape)[12:20, 12:20]
    assert np.median(c) == pytest.approx(np.pi / 2, rel=0.05)


def test_evolve_preserves_positivity_and_l1_decreases():
    p = FracParams(0.5, 1.0, 1)
    g = SpectralGrid(1, 128, 16.0)
    op = assemble_operator(KernelSpec.fractional_laplacian(1, 1.0), g)
    states = evolve(p, op, Field.gaussian(g), 0.5, 100)
    assert len(states) == 101 and states[-1].time == 50.0
    l1 = gridsolver.l1_series(states).values
    assert np.all(np.diff(l1) <= 1e-13)
    assert min(s.values.min() for s in states) > -1e-12


def test_evolve_classical_matches_implicit_euler():
    # alpha = 1: the scheme is backward Euler
    p = FracParams(1.0, 1.0, 1)
    g = SpectralGrid(1, 64, 8.0)
    op = assemble_operator(KernelSpec.fractional_laplacian(1, 1.0), g)
    u0 = Field.gaussian(g)
    states = evolve(p, op, u0, 0.1, 3)
    u = u0.values
    step = np.eye(64) + 0.1 * op.matrix
    for k in range(3):
        u = np.linalg.solve(step, u)
    np.testing.assert_allclose(states[-1].values, u, atol=1e-13)


def test_comparison_ode():
    t = np.linspace(0.0, 10.0, 1001)
    # alpha = 1, gamma = 2: w = 1/(1 + t)
    w = solve_comparison_ode(1.0, 1.0, 2.0, 1.0, t)
    np.testing.assert_allclose(w, 1 / (1 + t), atol=1e-4)
    assert np.all(solve_comparison_ode(0.5, 0.0, 2.0, 3.0, t) == 3.0)

    # long-time rate -alpha/gamma
    t = np.arange(2001) * 0.5
    w = solve_comparison_ode(0.5, 1.0, 3.0, 1.0, t)
    assert fit_rate(NormSeries(t, w, 2.0)).slope == pytest.approx(-0.5 / 3, abs=0.05)
    with pytest.raises(ValueError):
        solve_comparison_ode(0.5, 1.0, 1.0, 1.0, t)


def test_energy_check_holds():
    p = FracParams(0.5, 1.0, 1)
    g = SpectralGrid(1, 128, 16.0)
    op = assemble_operator(KernelSpec.fractional_laplacian(1, 1.0), g)
    states = evolve(p, op, Field.gaussian(g), 0.5, 200)
    check = gridsolver.energy_series(p, op, states)
    assert check.fraction_satisfied == 1.0
    assert check.mu > 0 and check.nash_constant > 0

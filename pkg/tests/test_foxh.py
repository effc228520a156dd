from __future__ import annotations

import math

import numpy as np
import pytest

from fracflow import foxh, kernels
from fracflow.errors import OutOfConvergenceRegion, PoleHit
from fracflow.kernels import FracParams
from fracflow.special import mittag_leffler

EXP_SPEC = foxh.FoxHSpec(1, 0, (), ((0.0, 1.0),))  # e^{-z}
GEOM_SPEC = foxh.FoxHSpec(1, 1, ((0.0, 1.0),), ((0.0, 1.0),))  # 1/(1+z)


def test_elementary_functions():
    z = np.logspace(-3, 1.5, 25)
    np.testing.assert_allclose(foxh.eval(EXP_SPEC, z), np.exp(-z), rtol=1e-12)
    z = np.logspace(-3, 3, 25)
    np.testing.assert_allclose(foxh.eval(GEOM_SPEC, z), 1 / (1 + z), rtol=1e-12)


def test_spec_properties():
    assert GEOM_SPEC.mu == 0.0
    assert GEOM_SPEC.delta == 1.0
    assert EXP_SPEC.a_star == 1.0
    with pytest.raises(ValueError):
        foxh.FoxHSpec(2, 0, (), ((0.0, 1.0),))
    with pytest.raises(ValueError):
        foxh.FoxHSpec(1, 0, (), ((0.0, -1.0),))
    with pytest.raises(ValueError):
        foxh.EvalPolicy(crossover_z=0.0)


@pytest.mark.parametrize(("alpha", "beta"), [(0.5, 1.0), (0.8, 0.9), (0.3, 0.3), (1.5, 1.2)])
def test_mittag_leffler_spec(alpha, beta):
    z = np.logspace(-3, 3, 13)
    spec = foxh.mittag_leffler_spec(alpha, beta)
    np.testing.assert_allclose(foxh.eval(spec, z), mittag_leffler(alpha, beta, -z), rtol=1e-10)


def test_mellin_kernel():
    assert foxh.mellin_kernel(EXP_SPEC, 2.5) == pytest.approx(math.gamma(2.5))
    s = 0.3 + 0.4j
    expected = math.pi / np.sin(np.pi * s)
    assert foxh.mellin_kernel(GEOM_SPEC, s) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(PoleHit):
        foxh.mellin_kernel(EXP_SPEC, -2.0)
    # reciprocal Gamma factors vanish on their poles
    spec = foxh.FoxHSpec(1, 0, (), ((0.0, 1.0), (0.0, 1.0)))  # Gamma(s)/Gamma(1-s)
    assert foxh.mellin_kernel(spec, 2.0) == 0.0


def test_enumerate_poles_and_merging():
    poles = foxh.enumerate_poles(GEOM_SPEC, 4)
    assert [p.location for p in poles.left] == [0.0, -1.0, -2.0, -3.0]
    assert [p.location for p in poles.right] == [1.0, 2.0, 3.0, 4.0]
    assert all(p.order == 1 for p in poles.left)

    # Z with beta = d = 1: Gamma(1/2 + s/2) and Gamma(1 + s/2)... the first
    # two lower families collide at s = -1, -3, ... giving double poles
    spec = kernels.z_spec(FracParams(0.5, 1.0, 1))
    orders = [p.order for p in foxh.enumerate_poles(spec, 4).left]
    assert max(orders) == 2
    with pytest.raises(ValueError):
        foxh.enumerate_poles(GEOM_SPEC, 0)


def test_h_coefficients():
    np.testing.assert_allclose(foxh.h_coefficients(GEOM_SPEC, 4), [1, -1, 1, -1, 1])
    # E_{a,b}(-z) ~ sum_{k>=1} (-1)^(k+1) z^-k / Gamma(b - a k)
    a, b = 0.6, 1.0
    h = foxh.h_coefficients(foxh.mittag_leffler_spec(a, b), 3)
    expected = [(-1) ** k / math.gamma(b - a * (k + 1)) for k in range(4)]
    np.testing.assert_allclose(h, expected, rtol=1e-12)
    with pytest.raises(ValueError):
        foxh.h_coefficients(EXP_SPEC, 2)


@pytest.mark.parametrize(("alpha", "beta", "d"), [(0.5, 1.0, 1), (0.8, 1.5, 2), (0.3, 0.6, 1)])
def test_h0_vanishes_and_beta_two_expansion_vanishes(alpha, beta, d):
    p = FracParams(alpha, beta, d)
    assert foxh.h_coefficients(kernels.z_spec(p), 0)[0] == 0.0
    assert foxh.h_coefficients(kernels.y_spec(p), 0)[0] == 0.0
    q = FracParams(alpha, 2.0, d)
    assert np.all(foxh.h_coefficients(kernels.z_spec(q), 10) == 0.0)


@pytest.mark.parametrize(("alpha", "beta", "d"), [(0.5, 1.0, 1), (0.8, 1.5, 2), (1.0, 2.0, 3)])
@pytest.mark.parametrize("which", ["Z", "Y"])
def test_reflection_and_shift_identities(alpha, beta, d, which):
    p = FracParams(alpha, beta, d)
    spec = kernels.z_spec(p) if which == "Z" else kernels.y_spec(p)
    z = np.logspace(-3, 3, 20)
    v = foxh.eval(spec, z)
    live = v > 1e-290
    np.testing.assert_allclose(foxh.eval(spec.swapped(), 1 / z)[live], v[live], rtol=1e-8)
    np.testing.assert_allclose(foxh.eval(spec.shifted(), z)[live], (z * v)[live], rtol=1e-8)


def test_contour_agrees_with_series():
    spec = kernels.z_spec(FracParams(0.6, 1.4, 1))
    z = np.logspace(-2, 2, 9)
    v, err = foxh.evaluate(spec, z)
    vc, errc = foxh.eval_contour(spec, z)
    np.testing.assert_allclose(vc, v, rtol=1e-10)
    assert np.all(err <= 1e-10 * np.abs(v))


def test_small_series_diverges_for_negative_mu():
    spec = foxh.FoxHSpec(1, 1, ((0.0, 2.0),), ((0.0, 1.0),))
    with pytest.raises(OutOfConvergenceRegion):
        foxh.eval_small(spec, 0.5)


def test_beta_two_value_bounded_by_error_estimate():
    # all expansion coefficients at infinity vanish; only a bound survives
    spec = kernels.z_spec(FracParams(0.5, 2.0, 1))
    v, err = foxh.eval_large(spec, np.array([50.0]), foxh.EvalPolicy(
        tol=foxh.ToleranceConfig(abs_tol=1e-300, rel_tol=np.inf)))
    assert abs(v[0]) <= err[0]


def test_nonpositive_argument_rejected():
    with pytest.raises(ValueError):
        foxh.eval(GEOM_SPEC, -1.0)

from __future__ import annotations

import json
import math

import numpy as np

from fracflow import io
from fracflow.norms import NormSeries
from fracflow.spectral import Field, SpectralGrid


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, 2.0**-1074, 1e308, -7.25):
        assert float(io.fmt(x)) == x
    assert io.fmt(math.inf) == "inf" and io.fmt(math.nan) == "nan"


def test_field_round_trip(tmp_path):
    g = SpectralGrid(2, 32, 3.0)
    u = Field.gaussian(g, 0.5)
    path = io.write_field(tmp_path / "u.csv", u)
    assert path.read_text().splitlines()[0] == "x,y,value"
    np.testing.assert_array_equal(io.read_field(path, g).values, u.values)


def test_series_csv(tmp_path):
    s = NormSeries([1.0, 2.0], [0.5, 0.25], 2.0, weak=True)
    lines = io.write_series(tmp_path / "s.csv", s).read_text().splitlines()
    assert lines == ["t,value,p,weak", "1,0.5,2,1", "2,0.25,2,1"]


def test_json_is_versioned_and_sorted():
    text = io.dumps({"b": np.float64(1.5), "a": np.arange(2), "c": math.inf})
    data = json.loads(text)
    assert data["schema_version"] == io.SCHEMA_VERSION
    assert data["a"] == [0, 1] and data["c"] == "inf"
    assert list(data) == sorted(data)


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(io.OUTPUT_ENV, str(tmp_path / "x"))
    assert io.output_dir("elsewhere") == tmp_path / "x"
    monkeypatch.delenv(io.OUTPUT_ENV)
    assert io.output_dir(tmp_path / "y") == tmp_path / "y"


def test_component_modules_expose_operations():
    from fracflow import decay_lab, fox_h, grid_solver, kernels, special_functions, transform_solver

    for mod, names in [
        (special_functions, ["log_gamma", "mittag_leffler", "ml_envelope", "gl_weights", "rl_integral", "rl_derivative"]),
        (fox_h, ["mellin_kernel", "enumerate_poles", "eval_small", "eval_small_inverted", "h_coefficients", "eval_large", "eval"]),
        (kernels, ["z_kernel", "y_kernel", "z_hat", "y_hat", "z_gradient_norm", "y_gradient_norm", "y_time_derivative", "asymptotic_envelope", "kappa_thresholds", "kernel_lp_bound"]),
        (transform_solver, ["solve_homogeneous", "solve_forced", "residual", "radial_profile_from_hat", "moments"]),
        (grid_solver, ["assemble_operator", "evolve", "energy_series", "solve_comparison_ode", "l1_series"]),
        (decay_lab, ["lp_norm", "weak_lp_quasinorm", "gagliardo_seminorm", "fit_rate", "experiment_optimal_l2", "experiment_convergence_to_Z", "experiment_forced", "experiment_weak_decay"]),
    ]:
        for name in names:
            assert callable(getattr(mod, name)), (mod.__name__, name)

"""Command-line interface.

Subcommands ``ml``, ``foxh``, ``kernel``, ``solve``, ``weak`` and
``experiment``. Every subcommand accepts ``--config FILE`` with a JSON
object whose keys are flag names (dashes or underscores); explicit flags
win over the file. Output files go to ``--out``, overridden by the
``FRACFLOW_OUT`` environment variable.

Exit codes: 0 on success, 1 on a numerical failure (including a failed
check), 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib
import sys
from dataclasses import dataclass, field

import numpy as np

from fracflow import io
from fracflow.errors import FracFlowError, NumericalFailure, SingularAtOrigin

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one invocation."""

    command: str
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    output: str = "."
    seed: int = 0
    options: dict = field(default_factory=dict)


# {{{ parser


def _floats(text: str) -> list[float]:
    """Comma-separated list of reals."""
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: '{text}'") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=pathlib.Path, help="JSON file with flag defaults")
    p.add_argument("--out", default=None, help="output directory (FRACFLOW_OUT wins)")
    p.add_argument("--seed", type=int, default=0)


def _add_params(p: argparse.ArgumentParser, alpha=0.5, beta=1.5, d=1) -> None:
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--beta", type=float, default=beta)
    p.add_argument("--d", type=int, default=d)


EXPERIMENTS = ("optimal-l2", "kink", "zuazua", "forced", "weak", "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracflow",
        description="Kernels, solvers and decay experiments for time- and "
        "space-fractional diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml", help="Mittag-Leffler function E_{alpha,beta}(z)")
    _add_common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=_floats, required=True, help="comma-separated arguments")

    p = sub.add_parser("foxh", help="Fox H-function of a kernel or Mittag-Leffler spec")
    _add_common(p)
    _add_params(p)
    p.add_argument("--spec", choices=("Z", "Y", "dtY", "ml"), default="Z")
    p.add_argument("--gradient", action="store_true", help="shift b1 by one")
    p.add_argument("--z", type=_floats, required=True)

    p = sub.add_parser("kernel", help="fundamental solutions as CSV")
    _add_common(p)
    _add_params(p)
    p.add_argument("--kind", choices=("Z", "Y", "gradZ", "gradY", "dtY"), default="Z")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--r", type=_floats, required=True)
    p.add_argument("--file", default=None, help="CSV file name inside the output dir")

    p = sub.add_parser("solve", help="spectral solution from Gaussian data")
    _add_common(p)
    _add_params(p)
    p.add_argument("--N", type=int, default=1024)
    p.add_argument("--L", type=float, default=64.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--times", type=_floats, default=[1.0, 10.0, 100.0])
    p.add_argument("--gamma", type=float, default=None,
                   help="add forcing (1+t)^-gamma times the initial profile")
    p.add_argument("--samples", type=int, default=801, help="forcing samples")

    p = sub.add_parser("weak", help="grid solver with a general kernel")
    _add_common(p)
    _add_params(p, alpha=0.5, beta=1.0, d=1)
    p.add_argument("--kernel", choices=("exact", "perturbed"), default="exact")
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--L", type=float, default=64.0)
    p.add_argument("--dt", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=2000)

    p = sub.add_parser("experiment", help="decay experiments and the acceptance matrix")
    p.add_argument("name", help=f"one of {', '.join(EXPERIMENTS)}")
    p.add_argument("config_file", nargs="?", type=pathlib.Path, default=None,
                   help="JSON object of experiment arguments")
    _add_common(p)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    # read --config first so that its keys can stand in for required flags
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=pathlib.Path)
    known_args, _ = pre.parse_known_args(argv)
    path = known_args.config
    choices = parser._subparsers._group_actions[0].choices  # noqa: SLF001
    command = next((a for a in argv if a in choices), None)
    if path is None or command is None:
        return parser.parse_args(argv)

    config = _load_json(path)
    actions = {a.dest: a for a in choices[command]._actions}  # noqa: SLF001
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest not in actions or dest in ("config", "help"):
            raise UsageError(f"unknown key '{key}' in {path}")
        actions[dest].required = False
        defaults[dest] = value
    choices[command].set_defaults(**defaults)
    return parser.parse_args(argv)


def _load_json(path: pathlib.Path) -> dict:
    try:
        data = json.loads(pathlib.Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in '{path}': {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config '{path}' must hold a JSON object")
    return data


def _as_list(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, str):
        return _floats(value)
    return [float(value)]


def _params(args):
    from fracflow.kernels import FracParams

    return FracParams(args.alpha, args.beta, args.d)


# }}}


# {{{ commands


def cmd_ml(args, out) -> int:
    from fracflow.special import mittag_leffler

    z = np.array(_as_list(args.z))
    values = np.atleast_1d(mittag_leffler(args.alpha, args.beta, z))
    out.write("z,value\n")
    for zi, vi in zip(z, values):
        out.write(f"{io.fmt(zi)},{io.fmt(vi)}\n")
    return EXIT_OK


def cmd_foxh(args, out) -> int:
    from fracflow import foxh, kernels

    p = _params(args)
    spec = {
        "Z": kernels.z_spec,
        "Y": kernels.y_spec,
        "dtY": kernels.dty_spec,
        "ml": lambda p: foxh.mittag_leffler_spec(p.alpha, p.beta),
    }[args.spec](p)
    if args.gradient:
        spec = kernels.gradient_spec(spec)
    z = np.array(_as_list(args.z))
    value, err = foxh.evaluate(spec, z)
    out.write("z,value,err_est\n")
    for row in zip(z, np.atleast_1d(value), np.atleast_1d(err)):
        out.write(",".join(io.fmt(v) for v in row) + "\n")
    return EXIT_OK


_KERNELS = {
    "Z": "z_kernel",
    "Y": "y_kernel",
    "gradZ": "z_gradient_norm",
    "gradY": "y_gradient_norm",
    "dtY": "y_time_derivative",
}


def kernel_rows(kind: str, params, t: float, r: list[float]) -> list[tuple[float, str, str]]:
    """Rows ``(r, value, flag)``; points where the kernel is unbounded carry
    the flag ``SINGULAR`` and value ``inf``."""
    from fracflow import kernels

    func = getattr(kernels, _KERNELS[kind])
    rows = []
    for ri in r:
        try:
            value = float(np.asarray(func(params, t, ri)).reshape(-1)[0])
            rows.append((ri, io.fmt(value), ""))
        except SingularAtOrigin:
            rows.append((ri, "inf", "SINGULAR"))
        except ValueError:
            if ri != 0:
                raise
            rows.append((ri, "inf", "SINGULAR"))
    return rows


def cmd_kernel(args, out) -> int:
    rows = kernel_rows(args.kind, _params(args), args.t, _as_list(args.r))
    header = ["r", "value", "flag"]
    if args.file:
        path = io.write_rows(io.output_dir(args.out) / args.file, header,
                             ([io.fmt(r), v, f] for r, v, f in rows))
        print(path, file=sys.stderr)
    out.write(",".join(header) + "\n")
    for r, v, f in rows:
        out.write(f"{io.fmt(r)},{v},{f}\n")
    return EXIT_OK


def cmd_solve(args, out) -> int:
    from fracflow import spectral
    from fracflow.norms import lp_norm

    p = _params(args)
    grid = spectral.SpectralGrid(p.d, args.N, args.L)
    times = _as_list(args.times)
    u0 = spectral.Field.gaussian(grid, args.width, args.mass)
    if args.gamma is None:
        sols = spectral.solve_homogeneous(p, u0, times)
    else:
        gamma = args.gamma
        samples = np.expm1(np.linspace(0.0, math.log1p(max(times)), args.samples))
        forcing = spectral.ForcingSchedule.separable(
            grid, samples, lambda *x: u0.values, lambda t: (1 + t) ** (-gamma), gamma=gamma
        )
        sols = spectral.solve_forced(p, u0, forcing, times)

    outdir = io.output_dir(args.out)
    rows = []
    for k, u in enumerate(sols):
        io.write_field(outdir / f"solve_u{k:03d}.csv", u)
        mass, _ = spectral.moments(u)
        rows.append([u.time, mass, lp_norm(u, 1.0), lp_norm(u, 2.0), lp_norm(u, math.inf)])
    io.write_rows(outdir / "solve_norms.csv", ["t", "mass", "l1", "l2", "linf"], rows)
    config = RunConfig("solve", _params_dict(p), {"N": args.N, "L": args.L},
                       output=str(outdir), seed=args.seed,
                       options={"width": args.width, "mass": args.mass,
                                "times": times, "gamma": args.gamma})
    io.write_json(outdir / "solve_run.json", config)
    out.write("t,mass,l1,l2,linf\n")
    for row in rows:
        out.write(",".join(io.fmt(v) for v in row) + "\n")
    return EXIT_OK


def _params_dict(p) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "d": p.d}


def _write_report(outdir: pathlib.Path, stem: str, report) -> None:
    io.write_json(outdir / f"{stem}.json", {
        "experiment": report.experiment,
        "params": report.params,
        "predicted": report.predicted,
        "fitted": report.fitted,
        "passed": report.passed,
        "tolerance": report.tolerance,
        "seed": report.seed,
        "details": report.details,
    })
    for k, series in enumerate(report.series):
        io.write_series(outdir / f"{stem}_series{k}.csv", series)


def cmd_weak(args, out) -> int:
    from fracflow.experiments import experiment_weak_decay

    rep = experiment_weak_decay(
        _params(args), kernel=args.kernel, ratio=args.ratio, N=args.N, L=args.L,
        dt=args.dt, n_steps=args.steps, seed=args.seed,
    )
    _write_report(io.output_dir(args.out), f"weak_{args.kernel}", rep)
    out.write(rep.summary() + "\n")
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


def _experiment_runner(name: str):
    from fracflow import experiments as ex

    return {
        "optimal-l2": ex.experiment_optimal_l2,
        "kink": ex.experiment_kink,
        "zuazua": ex.experiment_convergence_to_Z,
        "forced": ex.experiment_forced,
        "weak": ex.experiment_weak_decay,
    }[name]


_DEFAULT_PARAMS = {
    "optimal-l2": (0.8, 2.0, 1),
    "zuazua": (0.5, 1.5, 1),
    "forced": (0.5, 1.5, 1),
    "weak": (0.5, 1.0, 1),
}


def run_experiment(name: str, config: dict, seed: int = 0):
    """Run one named experiment with keyword arguments from *config*.

    ``alpha``, ``beta`` and ``d`` build the parameters; the remaining keys
    are passed to the runner (lists become tuples).
    """
    import inspect

    from fracflow.kernels import FracParams

    runner = _experiment_runner(name)
    config = dict(config)
    kwargs = {}
    if name in _DEFAULT_PARAMS:
        a, b, d = _DEFAULT_PARAMS[name]
        kwargs["params"] = FracParams(
            float(config.pop("alpha", a)), float(config.pop("beta", b)), int(config.pop("d", d))
        )
    accepted = inspect.signature(runner).parameters
    for key, value in config.items():
        key = key.replace("-", "_")
        if key not in accepted or key == "params":
            raise UsageError(f"experiment '{name}' has no option '{key}'")
        kwargs[key] = tuple(value) if isinstance(value, list) else value
    if "seed" in accepted:
        kwargs.setdefault("seed", seed)
    try:
        return runner(**kwargs)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def cmd_experiment(args, out) -> int:
    name = args.name
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment '{name}'; choose from {', '.join(EXPERIMENTS)}")
    config = {} if args.config_file is None else _load_json(args.config_file)
    outdir = io.output_dir(args.out)

    if name == "all":
        if config:
            raise UsageError("'experiment all' takes no configuration")
        from fracflow.acceptance import run_acceptance

        results = run_acceptance(echo=lambda line: out.write(line + "\n"))
        io.write_json(outdir / "acceptance.json", {
            "passed": all(r.passed for r in results),
            "criteria": [
                {"number": r.number, "name": r.name, "passed": r.passed,
                 "measured": r.measured, "threshold": r.threshold, "budget": r.budget}
                for r in results
            ],
        })
        return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL

    rep = run_experiment(name, config, seed=args.seed)
    _write_report(outdir, name.replace("-", "_"), rep)
    out.write(rep.summary() + "\n")
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


COMMANDS = {
    "ml": cmd_ml,
    "foxh": cmd_foxh,
    "kernel": cmd_kernel,
    "solve": cmd_solve,
    "weak": cmd_weak,
    "experiment": cmd_experiment,
}


# }}}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"fracflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, sys.stdout)
    except UsageError as exc:
        print(f"fracflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"fracflow: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FracFlowError, ValueError) as exc:
        # invalid parameters (outside admissible ranges) are usage errors
        print(f"fracflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

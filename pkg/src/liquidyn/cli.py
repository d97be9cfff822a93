"""Command-line entry point: ``liquidyn <command> ...``.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from liquidyn import __version__
from liquidyn.cycles import HarmonicModel, fit_harmonics, mean_impact, reconstruct
from liquidyn.errors import ValidationError
from liquidyn.indicators import SHOCK_ESTIMATOR_FORMULA, derive_parameters, market_inertia
from liquidyn.io import InputError, dump_params, load_indicators, load_params, load_scenario, load_time_series, parse_overrides
from liquidyn.model import GEORGIA_2024, ParameterSet, balance, decompose_epsilon
from liquidyn.report import FORMATS, Report, balance_warnings, emit_report, input_digest
from liquidyn.scenario import (
    apply_scenario,
    dynamic_epsilon_series,
    monte_carlo_balance,
    oat_sensitivity,
    run_scenario,
)
from liquidyn.stochastic import ShockConfig, derive_seeds, wiener_path

SEED_ENV = "LIQUIDYN_SEED"
EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3

GDP_TRANSFORM_NOTE = "values fitted as given (percent cells divided by 100), mean removed"


def resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer, got {env!r}", "seed") from None
    return 0


def _base_params(args: argparse.Namespace) -> ParameterSet:
    base = GEORGIA_2024
    if getattr(args, "params", None):
        base = load_params(args.params, base=GEORGIA_2024)
    overrides = {}
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--set expects name=value, got {item!r}", "set")
        overrides[key] = value
    if overrides:
        base = base.replace(**parse_overrides(overrides))
    return base


def _params_inputs(args: argparse.Namespace) -> list:
    parts: list = [sorted(getattr(args, "set", None) or [])]
    if getattr(args, "params", None):
        parts.append(Path(args.params))
    return parts


def _fit_gdp(args: argparse.Namespace):
    series = load_time_series(args.gdp)
    model = fit_harmonics(series, args.k, detrend=args.detrend)
    t = series.times
    return series, model, float(t[0]), float(t[-1])


def _component_rows(model: HarmonicModel) -> list[dict[str, float]]:
    return [
        {
            "a": c.a,
            "b": c.b,
            "omega": c.omega,
            "period": c.period,
            "peak_period": c.peak_period,
            "amplitude": c.amplitude,
            "phase": c.phase,
            "power": c.power,
        }
        for c in model.components
    ]


def _finish(report: Report, args: argparse.Namespace, lines: list[str]) -> int:
    paths = emit_report(report, args.out, args.format)
    for line in lines:
        print(line)
    for w in report.warnings:
        print(f"warning: {w}")
    print("wrote " + ", ".join(str(p) for p in paths))
    return EXIT_OK


# --- commands ----------------------------------------------------------------------

def cmd_derive(args: argparse.Namespace) -> int:
    bundle = load_indicators(args.data)
    notes = {}
    inputs: list = [Path(args.data), args.epsilon]
    if args.gdp:
        series, model, t0, t1 = _fit_gdp(args)
        force = mean_impact(model, t0, t1, args.samples)
        notes["cyclical_force"] = f"mean |F_GDP(t)| over [{t0:g}, {t1:g}] from {args.k} harmonics"
        notes["gdp_transform"] = GDP_TRANSFORM_NOTE
        inputs += [Path(args.gdp), args.k, args.detrend, args.samples]
    else:
        force = args.cyclical_force
        inputs.append(force)
    params = derive_parameters(bundle, force, args.epsilon)
    if bundle.shock_intensity is None:
        notes["shock"] = "estimated: " + SHOCK_ESTIMATOR_FORMULA
    inertia = market_inertia(bundle.equity_index_prices, bundle.sovereign_bond_prices)
    if args.output:
        dump_params(params, args.output)
    report = Report(
        command="derive",
        input_digest=input_digest(*inputs),
        parameters=params.to_dict(),
        summary={"relative_volatility": inertia["relative_volatility"]},
        notes=notes,
    )
    lines = [f"{k} = {v:.6g}" for k, v in params.to_dict().items()]
    return _finish(report, args, lines)


def cmd_balance(args: argparse.Namespace) -> int:
    params = _base_params(args)
    eps = params.epsilon if args.epsilon is None else args.epsilon
    result = balance(params, eps)
    report = Report(
        command="balance",
        input_digest=input_digest(*_params_inputs(args), eps),
        parameters=params.to_dict(),
        balances={"baseline": result},
        epsilon_breakdown=decompose_epsilon(eps),
        warnings=balance_warnings(result, args.tolerance),
    )
    lines = [
        f"lhs = {result.lhs:.6g}",
        f"rhs = {result.rhs:.6g} (partial {result.rhs_partial:.6g} + epsilon {eps:.6g})",
        f"imbalance = {result.imbalance:.6g}",
        f"epsilon_required = {result.epsilon_required:.6g}",
    ]
    return _finish(report, args, lines)


def cmd_fourier(args: argparse.Namespace) -> int:
    series = load_time_series(args.series, args.column)
    model = fit_harmonics(series, args.k, detrend=args.detrend)
    times = series.times
    t0 = float(times[0]) if args.t0 is None else args.t0
    t1 = float(times[-1]) if args.t1 is None else args.t1
    impact = mean_impact(model, t0, t1, args.samples)
    grid = np.linspace(t0, t1, args.samples)
    detrended = np.asarray(series.values) - model.trend_mean - model.trend_slope * times
    report = Report(
        command="fourier",
        input_digest=input_digest(Path(args.series), args.column, args.k, args.detrend, t0, t1, args.samples),
        summary={
            "trend_mean": model.trend_mean,
            "trend_slope": model.trend_slope,
            "total_power": model.total_power,
            "residual_power": model.residual_power,
            "components": _component_rows(model),
            "mean_impact": impact,
            "window": [t0, t1],
        },
        series={
            "cyclical_force": (grid, reconstruct(model, grid)),
            "detrended": (times, detrended),
        },
        notes={"transform": GDP_TRANSFORM_NOTE, "detrend": args.detrend,
               "mean_impact": "mean absolute value of the harmonic sum"},
    )
    lines = [f"period {c.period:.6g} (peak {c.peak_period:.6g}) amplitude {c.amplitude:.6g}"
             for c in model.components]
    lines.append(f"mean impact = {impact:.6g}")
    return _finish(report, args, lines)


def cmd_simulate(args: argparse.Namespace) -> int:
    seed = resolve_seed(args)
    base = _base_params(args)
    sigma = base.shock if args.sigma is None else args.sigma
    cfg = ShockConfig(sigma=sigma, n_steps=args.steps, dt=args.dt)
    inputs = _params_inputs(args) + [seed, sigma, args.steps, args.dt, args.paths, args.t0]
    notes = {"seeding": "path i uses splitmix64(seed + (i+1)*0x9E3779B97F4A7C15); normals by inverse CDF"}
    if args.gdp:
        _, model, _, _ = _fit_gdp(args)
        inputs += [Path(args.gdp), args.k, args.detrend]
        notes["gdp_transform"] = GDP_TRANSFORM_NOTE
    else:
        model = HarmonicModel(trend_mean=0.0)
        notes["cyclical_force"] = "no GDP series given; cyclical force held at 0"
    summary = monte_carlo_balance(base, model, cfg, args.paths, seed, t0=args.t0, workers=args.workers)
    first_seed = int(derive_seeds(seed, [0])[0])
    dyn = dynamic_epsilon_series(base, model, cfg, first_seed, args.t0)
    path = wiener_path(first_seed, cfg.n_steps, cfg.dt)
    report = Report(
        command="simulate",
        input_digest=input_digest(*inputs),
        parameters=base.to_dict(),
        summary={"seed": seed, "paths": args.paths, "steps": args.steps, "dt": args.dt,
                 "sigma": sigma, **summary},
        series={
            "epsilon_required_path0": (dyn.times, dyn.epsilon_required),
            "wiener_path0": (dyn.times, path.values),
            "cyclical_force": (dyn.times, dyn.cyclical_force),
        },
        notes=notes,
    )
    term = summary["terminal_epsilon_required"]
    lines = [f"terminal epsilon_required: mean {term['mean']:.6g} std {term['std']:.6g} "
             f"p05 {term['p05']:.6g} p95 {term['p95']:.6g}"]
    return _finish(report, args, lines)


def _scenario_context(args: argparse.Namespace):
    base = _base_params(args)
    scenario = load_scenario(args.scenario, baseline=base)
    inputs = _params_inputs(args) + [Path(args.scenario)]
    indicators = {p.target: p.new_value for p in scenario.indicators}
    return base, scenario, inputs, indicators


def cmd_stress(args: argparse.Namespace) -> int:
    base, scenario, inputs, indicators = _scenario_context(args)
    stressed = apply_scenario(base, scenario)
    result = run_scenario(base, scenario)
    eps = result.epsilon_supplied
    report = Report(
        command="stress",
        input_digest=input_digest(*inputs),
        parameters=stressed.to_dict(),
        balances={"baseline": balance(base, eps), "scenario": result},
        epsilon_breakdown=decompose_epsilon(result.epsilon_required),
        summary={"scenario": scenario.name, "indicators": indicators},
        warnings=list(scenario.warnings) + balance_warnings(result, args.tolerance),
    )
    lines = [
        f"scenario {scenario.name}: lhs {result.lhs:.6g}, rhs {result.rhs:.6g}, "
        f"imbalance {result.imbalance:.6g}, epsilon_required {result.epsilon_required:.6g}",
    ]
    return _finish(report, args, lines)


def cmd_sensitivity(args: argparse.Namespace) -> int:
    base, scenario, inputs, indicators = _scenario_context(args)
    sens = oat_sensitivity(base, scenario)
    report = Report(
        command="sensitivity",
        input_digest=input_digest(*inputs),
        parameters=base.to_dict(),
        balances={"baseline": sens.baseline},
        sensitivity=sens,
        summary={"scenario": scenario.name, "indicators": indicators},
        warnings=list(scenario.warnings),
    )
    lines = [f"{'target':<18}{'side':<6}{'d_lhs':>12}{'d_rhs':>12}{'d_imbalance':>14}"]
    lines += [f"{r.target:<18}{r.side.value:<6}{r.delta_lhs:>12.6g}{r.delta_rhs:>12.6g}"
              f"{r.delta_imbalance:>14.6g}" for r in sens.rows]
    return _finish(report, args, lines)


# --- parser ------------------------------------------------------------------------

def _global_options(suppress: bool) -> argparse.ArgumentParser:
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=default(None),
                   help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--tolerance", type=float, default=default(1e-4),
                   help="absolute tolerance for balance warnings")
    p.add_argument("--format", choices=FORMATS, default=default("structured"))
    p.add_argument("--out", default=default("liquidyn-out"), help="output directory")
    return p


def _param_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="JSON parameter file (missing names use the Georgia 2024 baseline)")
    p.add_argument("--set", action="append", metavar="NAME=VALUE", help="override one parameter")


def _gdp_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("-k", type=int, default=3, help="number of harmonics")
    p.add_argument("--detrend", choices=("mean", "linear"), default="mean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liquidyn", parents=[_global_options(False)],
                                     description="Liquidity-flow balance engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_options(True)]

    p = sub.add_parser("derive", parents=common, help="derive parameters from an indicator table")
    p.add_argument("data")
    p.add_argument("-o", "--output", help="write the parameter set as JSON")
    p.add_argument("--cyclical-force", type=float, default=GEORGIA_2024.cyclical_force)
    p.add_argument("--epsilon", type=float, default=GEORGIA_2024.epsilon)
    p.add_argument("--gdp", help="annual GDP series; cyclical force becomes its mean impact")
    p.add_argument("--samples", type=int, default=1001)
    _gdp_options(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("balance", parents=common, help="evaluate the balance")
    _param_options(p)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("fourier", parents=common, help="fit harmonics to an annual series")
    p.add_argument("series")
    p.add_argument("--column")
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--samples", type=int, default=1001)
    _gdp_options(p)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("simulate", parents=common, help="Monte Carlo dynamic residual")
    _param_options(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--sigma", type=float, help="shock scale (default: the baseline shock)")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--gdp", help="annual GDP series driving the cyclical force")
    _gdp_options(p)
    p.set_defaults(func=cmd_simulate)

    for name, func, text in (("stress", cmd_stress, "run a stress scenario"),
                             ("sensitivity", cmd_sensitivity, "one-at-a-time sensitivity")):
        p = sub.add_parser(name, parents=common, help=text)
        p.add_argument("scenario")
        _param_options(p)
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

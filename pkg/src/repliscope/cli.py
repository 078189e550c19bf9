"""Command-line front end.

Subcommands::

    solve       steady state for one config -> metrics table
    series      force the series route (no targeting) -> metrics table
    simulate    seeded Monte Carlo -> metrics table + diagnostics
    sweep       vary one parameter over a range -> long-form table
    figure      bundled scenario datasets + rendered plot
    check-comms communication-suppression report (gradients + conditions)

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 I/O failure. Primary output goes to ``--out`` (stdout by default);
stderr carries diagnostics only.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .comms import SWEEP_AXES, approx_conditions, sweep
from .config import load_params
from .errors import ConvergenceError, RepliscopeError
from .figures import figure_ids, render_figure
from .metrics import metrics_table
from .params import ModelParams, resize_to_bound
from .series import series_distribution
from .simulate import run as run_simulation
from .solve import steady_state
from .tableio import emit_sweep, emit_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repliscope",
        description="Steady-state tally distributions of published hypotheses.",
    )
    parser.add_argument("--version", action="version", version=f"repliscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="parameter file (key = value)")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_solve = sub.add_parser("solve", help="steady state via the best available route")
    add_common(p_solve)
    p_solve.add_argument("--tol", type=float, default=1e-12, help="fixed-point tolerance")

    p_series = sub.add_parser("series", help="steady state via the series solution only")
    add_common(p_series)

    p_sim = sub.add_parser("simulate", help="seeded event-level Monte Carlo")
    add_common(p_sim)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--events", type=int, default=1_000_000)

    p_sweep = sub.add_parser("sweep", help="steady states along one varied parameter")
    add_common(p_sweep)
    p_sweep.add_argument("--vary", required=True, choices=SWEEP_AXES, metavar="KEY",
                         help=f"one of {', '.join(SWEEP_AXES)}")
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--points", type=int, required=True)
    p_sweep.add_argument("--log", action="store_true", help="log-spaced values")
    p_sweep.add_argument("--tol", type=float, default=1e-12)

    p_fig = sub.add_parser("figure", help="bundled scenario datasets and plot")
    p_fig.add_argument("--id", dest="fig_id", required=True, metavar="FIGID",
                       help=f"one of {', '.join(figure_ids())}")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.add_argument("--tol", type=float, default=1e-12)
    p_fig.add_argument("--no-plot", action="store_true", help="datasets only, skip the PNG")

    p_comms = sub.add_parser("check-comms", help="communication-suppression report")
    add_common(p_comms)
    p_comms.add_argument("--step", type=float, default=1e-5,
                         help="one-sided finite-difference step")
    return parser


def _target(out: str | None):
    return sys.stdout if out is None else out


def _cmd_solve(args, params: ModelParams) -> int:
    dist = steady_state(params, tol=args.tol)
    emit_table(metrics_table(dist), args.format, _target(args.out))
    return EXIT_OK


def _cmd_series(args, params: ModelParams) -> int:
    dist = resize_to_bound(series_distribution(params), params.tally_bound).normalized()
    emit_table(metrics_table(dist), args.format, _target(args.out))
    return EXIT_OK


def _cmd_simulate(args, params: ModelParams) -> int:
    outcome = run_simulation(params, seed=args.seed, events=args.events)
    table = metrics_table(outcome.histogram)
    diagnostics = {
        "seed": outcome.seed,
        "events": outcome.events,
        "population_size": outcome.population_size,
        "forced_novel_events": outcome.diagnostics.forced_novel_events,
        "empty_target_events": outcome.diagnostics.empty_target_events,
        "cull_events": outcome.diagnostics.cull_events,
    }
    emit_table(table, args.format, _target(args.out), diagnostics=diagnostics)
    return EXIT_OK


def _cmd_sweep(args, params: ModelParams) -> int:
    if args.points < 2:
        raise RepliscopeError("--points must be >= 2")
    if args.log:
        if args.start <= 0 or args.stop <= 0:
            raise RepliscopeError("--log needs positive --from and --to")
        values = np.logspace(np.log10(args.start), np.log10(args.stop), args.points)
    else:
        values = np.linspace(args.start, args.stop, args.points)
    points = sweep(params, args.vary, values, tol=args.tol)
    emit_sweep(points, args.format, _target(args.out))
    return EXIT_OK


def _cmd_figure(args) -> int:
    created = render_figure(args.fig_id, args.out, tol=args.tol, plot=not args.no_plot)
    for path in created:
        print(path, file=sys.stderr)
    return EXIT_OK


def _cmd_check_comms(args, params: ModelParams) -> int:
    report = approx_conditions(params, step=args.step)
    payload = {
        "numeric_gradients": report.numeric_gradients,
        "approx_derivatives": report.approx_derivatives,
        "conditions": report.conditions,
        "regime_valid": report.regime_valid,
        "step": report.step,
    }
    text = json.dumps(payload, indent=2)
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figure":
            return _cmd_figure(args)
        params = load_params(args.config)
        if args.command == "solve":
            return _cmd_solve(args, params)
        if args.command == "series":
            return _cmd_series(args, params)
        if args.command == "simulate":
            return _cmd_simulate(args, params)
        if args.command == "sweep":
            return _cmd_sweep(args, params)
        if args.command == "check-comms":
            return _cmd_check_comms(args, params)
        raise AssertionError(f"unhandled command {args.command}")
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except RepliscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

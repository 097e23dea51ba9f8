"""Command-line interface.

Subcommands: ``multiplier``, ``solve``, and the five studies
(``converge-delta``, ``converge-beta``, ``regularity``, ``asymptotics``,
``temporal``).  Studies read a JSON config (``--config PATH``) which
individual flags override; reports go to ``--out`` or stdout as CSV
(default) or JSON.  Exit codes: 0 when the study verdict passes, 2 when it
fails, 1 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DomainError, InsufficientDataError, NonConvergenceError, \
    ShapeError, UsageError
from .harness import StudyConfig, Sweep, config_from_dict, config_to_dict, run_study
from .multiplier import KernelParams, multiplier_hypergeometric
from .torus import synthetic_field, zero_field
from .wave import (
    combined_problem,
    derivative,
    forced_problem,
    homogeneous_problem,
    snapshot_to_json,
)
from .multiplier import build_table

_STUDY_COMMANDS = ("converge-delta", "converge-beta", "regularity",
                   "asymptotics", "temporal")


class _Parser(argparse.ArgumentParser):
    """argparse variant that raises instead of calling sys.exit(2)."""

    def error(self, message):
        raise UsageError(message)


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="JSON study config")
    parser.add_argument("--n", type=int)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--K", type=int, dest="K")
    parser.add_argument("--t", type=float)
    parser.add_argument("--s1", type=float)
    parser.add_argument("--s2", type=float)
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--q", type=float)
    parser.add_argument("--p", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--sweep-param", metavar="NAME")
    parser.add_argument("--sweep-values", metavar="V1,V2,...",
                        help="comma-separated grid for the swept parameter")


def _build_parser() -> _Parser:
    parser = _Parser(prog="periwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    mult = sub.add_parser("multiplier", help="print one multiplier value")
    mult.add_argument("--n", type=int, required=True)
    mult.add_argument("--delta", type=float, required=True)
    mult.add_argument("--beta", type=float, required=True)
    mult.add_argument("--r", type=float, required=True)

    solve_p = sub.add_parser("solve", help="solve one problem, emit the snapshot as JSON")
    solve_p.add_argument("--problem", choices=("homogeneous", "forced", "combined"),
                         default="homogeneous")
    solve_p.add_argument("--order", type=int, default=0,
                         help="time-derivative order of the emitted snapshot")
    _add_config_flags(solve_p)

    for name in _STUDY_COMMANDS:
        study_p = sub.add_parser(name, help=f"run the {name} study")
        _add_config_flags(study_p)
    return parser


def _config_from_args(args: argparse.Namespace) -> StudyConfig:
    payload: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"--config: invalid JSON in {args.config}: {exc}") from exc
        if not isinstance(payload, dict):
            raise UsageError("--config: top-level JSON value must be an object")
    for key in ("n", "delta", "beta", "K", "t", "s1", "s2", "sigma", "epsilon",
                "q", "p", "tol", "seed", "format", "out"):
        value = getattr(args, key, None)
        if value is not None:
            payload[key] = value
    if args.sweep_param is not None or args.sweep_values is not None:
        if args.sweep_param is None or args.sweep_values is None:
            raise UsageError("--sweep-param and --sweep-values must be given together")
        try:
            values = [float(v) for v in args.sweep_values.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"--sweep-values: {exc}") from exc
        payload["sweep"] = {"param": args.sweep_param, "values": values}
    return config_from_dict(payload)


def _emit(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _run_multiplier(args) -> int:
    value = multiplier_hypergeometric(KernelParams(args.n, args.delta, args.beta), args.r)
    print(repr(value))
    return 0


def _run_solve(args) -> int:
    cfg = _config_from_args(args)
    table = build_table(KernelParams(cfg.n, cfg.delta, cfg.beta), cfg.box_radius)
    K = cfg.box_radius
    if args.problem == "forced":
        sigma = cfg.sigma if cfg.sigma is not None else cfg.s1
        b = synthetic_field(cfg.n, K, sigma, cfg.seed)
        problem = forced_problem(table, b)
    else:
        f = synthetic_field(cfg.n, K, cfg.s1, cfg.seed)
        g = synthetic_field(cfg.n, K, cfg.s2, cfg.seed + 1)
        if args.problem == "combined":
            sigma = cfg.sigma if cfg.sigma is not None else cfg.s1
            b = synthetic_field(cfg.n, K, sigma, cfg.seed + 2)
            problem = combined_problem(table, f, g, b)
        else:
            problem = homogeneous_problem(table, f, g)
    snapshot = derivative(problem, cfg.t, args.order)
    _emit(snapshot_to_json(snapshot) + "\n", cfg.out)
    return 0


def _run_study(command: str, args) -> int:
    cfg = _config_from_args(args)
    report = run_study(command, cfg)
    _emit(report.rendered(), cfg.out)
    return 0 if report.passed else 2


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "multiplier":
            return _run_multiplier(args)
        if args.command == "solve":
            return _run_solve(args)
        return _run_study(args.command, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ShapeError, InsufficientDataError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line entry point.

Subcommands:
    run       one experiment from a config file and/or flags; writes CSV
    verify    a randomized verification suite; writes a JSON report
    compare   several optimizers on one objective; writes a JSON summary
    bound     print the recede bound for explicit inputs

Exit codes: 0 success, 1 usage/config error, 2 suite failure, 3 run
divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import analysis, harness
from .errors import AdafixError, ConfigError
from .harness import SUITE_KINDS, build_config, parse_config_file
from .numerics import ParamVector
from .objectives import OBJECTIVE_NAMES
from .optimizers import OPTIMIZER_NAMES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SUITE_FAILURE = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code pinned to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--objective", choices=OBJECTIVE_NAMES)
    parser.add_argument("--optimizer", choices=OPTIMIZER_NAMES)
    parser.add_argument("--x0", help="comma-separated initial point, e.g. '1.0,0.3'")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--beta1", type=float)
    parser.add_argument("--beta2", type=float)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--mu", type=float, help="SGDM momentum")
    parser.add_argument("--L0", type=float, help="AdaFix initial smoothness estimate")
    parser.add_argument("--bound-final", type=float, help="AdaBound asymptotic rate")
    parser.add_argument(
        "--gate-signed",
        action="store_const",
        const=True,
        help="AdaFix: gate on max_i g_i instead of max_i |g_i|",
    )
    parser.add_argument(
        "--freeze-permanent",
        action="store_const",
        const=True,
        help="AdaFix: the first closed gate freezes v for the rest of the run",
    )
    parser.add_argument("--seed", type=int)
    parser.add_argument("--noise-sigma", type=float)
    parser.add_argument("--record-every", type=int)
    parser.add_argument("--output", help="CSV output path")
    parser.add_argument("--plot", help="render diagnostics figure to this file")
    parser.add_argument("--bowl-delta", type=float)
    parser.add_argument("--opc-c", type=float)
    parser.add_argument("--opc-x-star")
    parser.add_argument("--aniso-diag")


def _overrides_from_args(args: argparse.Namespace) -> dict:
    keys = (
        "objective", "optimizer", "x0", "steps", "eta", "beta1", "beta2",
        "epsilon", "mu", "L0", "bound_final", "gate_signed", "freeze_permanent",
        "seed", "noise_sigma", "record_every", "output",
        "bowl_delta", "opc_c", "opc_x_star", "aniso_diag",
    )
    return {key: getattr(args, key, None) for key in keys}


def _config_from_args(args: argparse.Namespace) -> harness.ExperimentConfig:
    mapping = parse_config_file(args.config) if args.config else {}
    return build_config(mapping, _overrides_from_args(args))


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    record = harness.run_experiment(cfg)
    final = record.rows[-1]
    if args.plot:
        from .plotting import plot_trajectory

        plot_trajectory(record, args.plot)
    summary = {
        "objective": record.objective,
        "optimizer": record.optimizer,
        "steps_completed": final.t,
        "rows": len(record.rows),
        "diverged": record.diverged,
        "final_dist_to_opt": final.dist_to_opt,
        "output": cfg.output_path,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_DIVERGED if record.diverged else EXIT_OK


_SUITE_DEFAULT_CASES = {"recede_bound": 1000, "gradients": 100, "optimizer_properties": 5}


def _cmd_verify(args: argparse.Namespace) -> int:
    n_cases = args.cases if args.cases is not None else _SUITE_DEFAULT_CASES[args.kind]
    report = harness.run_verification_suite(args.kind, seed=args.seed, n_cases=n_cases)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    summary = {k: v for k, v in report.items() if k != "cases"}
    print(json.dumps(summary, indent=2))
    return EXIT_OK if report["passed"] else EXIT_SUITE_FAILURE


def _cmd_compare(args: argparse.Namespace) -> int:
    mapping = dict(parse_config_file(args.config)) if args.config else {}
    # --output / output= name the JSON summary here, not per-run CSVs
    mapping.pop("output", None)
    overrides = _overrides_from_args(args)
    overrides.pop("output", None)
    names = args.optimizers
    if len(names) < 2:
        raise ConfigError("compare needs at least 2 optimizers")
    cfgs = []
    for name in names:
        merged = dict(overrides)
        merged["optimizer"] = name
        cfgs.append(build_config(mapping, merged))
    summary = harness.compare_optimizers(cfgs, radius=args.radius)
    if args.plot:
        from .plotting import plot_comparison

        records = {
            cfg.optimizer: harness.run_experiment(replace(cfg, output_path=None))
            for cfg in cfgs
        }
        plot_comparison(records, args.plot, radius=summary["radius"])
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_bound(args: argparse.Namespace) -> int:
    x = ParamVector([float(p) for p in args.x.replace(",", " ").split()])
    x_star = ParamVector([float(p) for p in args.x_star.replace(",", " ").split()])
    g = ParamVector([float(p) for p in args.grad.replace(",", " ").split()])
    out = {
        "bound": analysis.recede_bound(x, x_star, g, args.delta, args.eta),
    }
    if args.bound_literal:
        out["bound_literal"] = analysis.recede_bound_literal(x, x_star, g, args.delta)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adafix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one experiment")
    _add_run_flags(run_parser)
    run_parser.set_defaults(func=_cmd_run)

    verify_parser = sub.add_parser("verify", help="run a verification suite")
    verify_parser.add_argument("kind", choices=SUITE_KINDS)
    verify_parser.add_argument("--seed", type=int, default=0)
    verify_parser.add_argument(
        "--cases", type=int, default=None,
        help="configurations / points per objective / randomized runs "
        "(default: 1000 / 100 / 5 by suite)",
    )
    verify_parser.add_argument("--output", help="write the full JSON report here")
    verify_parser.set_defaults(func=_cmd_verify)

    compare_parser = sub.add_parser("compare", help="compare optimizers on one objective")
    _add_run_flags(compare_parser)
    compare_parser.add_argument(
        "--optimizers", nargs="+", required=True, metavar="NAME",
        help="two or more optimizer names sharing the base config",
    )
    compare_parser.add_argument("--radius", type=float, help="escape radius override")
    compare_parser.set_defaults(func=_cmd_compare)

    bound_parser = sub.add_parser("bound", help="print the recede bound")
    bound_parser.add_argument("--x", required=True, help="current point")
    bound_parser.add_argument("--x-star", required=True, help="optimum")
    bound_parser.add_argument("--grad", required=True, help="gradient at x")
    bound_parser.add_argument("--delta", type=float, required=True)
    bound_parser.add_argument("--eta", type=float, required=True)
    bound_parser.add_argument(
        "--bound-literal", action="store_true",
        help="also print the looser printed closed form (no eta factor)",
    )
    bound_parser.set_defaults(func=_cmd_bound)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdafixError as exc:
        print(f"adafix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"adafix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Four subcommands, each taking an experiment file:

* ``simulate``: Monte Carlo rounds of the policy plus baselines.
* ``analytic``: closed-form single-sensor operating point.
* ``global-baseline``: hindsight-optimal assignment over sampled rounds.
* ``sweep``: expand the file's [sweep] section, mode taken from [run].

The first three run the file's base parameters as a single point and
ignore any sweep. Exit codes: 0 success, 2 validation or usage error,
3 exact-solver size limit exceeded.
"""

from __future__ import annotations

import argparse
import sys

from .baselines import SolverLimitError
from .experiments import ExperimentSpec, columns_for, emit, run_point, run_spec
from .policy import REQUEST_RULES
from .world import ValidationError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER_LIMIT = 3

_RULE_ALIASES = {"corrected": "corrected-expected-cost"}


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("spec", help="experiment TOML file")
    parser.add_argument("--seed", type=int, default=None, help="override [run] seed")
    parser.add_argument("--trials", type=int, default=None, help="override [run] trials")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    parser.add_argument(
        "--no-header-timestamp",
        action="store_true",
        help="omit the generation-time comment for byte-reproducible output",
    )
    parser.add_argument(
        "--estimator",
        choices=("auto", "exact", "sample", "heuristic"),
        default=None,
        help="override [policy] estimator",
    )
    parser.add_argument(
        "--request-rule",
        choices=REQUEST_RULES + tuple(_RULE_ALIASES),
        default=None,
        help="override [policy] request rule",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cisim",
        description="Cost-aware collective inference over networked Gaussian sensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo policy rounds plus baselines")
    _add_common(p)

    p = sub.add_parser("analytic", help="closed-form single-sensor operating point")
    _add_common(p)
    p.add_argument(
        "--grid-points", type=int, default=None, help="override [run] grid_points"
    )

    p = sub.add_parser("global-baseline", help="hindsight-optimal assignment baseline")
    _add_common(p)

    p = sub.add_parser("sweep", help="run the file's [sweep] cartesian product")
    _add_common(p)
    p.add_argument(
        "--workers", type=int, default=1, help="parallel worker processes"
    )
    return parser


def _apply_overrides(spec: ExperimentSpec, args: argparse.Namespace) -> ExperimentSpec:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.estimator is not None:
        overrides["estimator"] = args.estimator
    if args.request_rule is not None:
        rule = _RULE_ALIASES.get(args.request_rule, args.request_rule)
        overrides["request_rule"] = rule
    if getattr(args, "grid_points", None) is not None:
        overrides["grid_points"] = args.grid_points
    return spec.replace(**overrides) if overrides else spec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = ExperimentSpec.from_toml(args.spec)
        spec = _apply_overrides(spec, args)
        if args.command == "sweep":
            if not spec.sweep:
                raise ValidationError(f"{args.spec} has no [sweep] section to expand")
            rows = run_spec(spec, workers=args.workers)
            mode = spec.mode
        else:
            mode = args.command
            spec = spec.replace(mode=mode)
            rows = [run_point(spec)]
        emit(
            rows,
            columns_for(mode),
            args.out,
            args.format,
            timestamp=not args.no_header_timestamp,
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER_LIMIT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

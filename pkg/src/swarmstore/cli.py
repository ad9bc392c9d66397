"""Command-line entry point.

Subcommands: ``run`` executes a scenario sweep (by file path or bundled
name), ``compare`` pairs policies across one or more summary CSVs, and
``catalog`` lists the bundled scenarios. Exit codes: 0 success, 2
configuration error, 3 I/O error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import AccountingError, ConfigurationError
from .scenario import (catalog, compare_policies, format_comparison,
                       load_bundled, parse_scenario, read_summary_csv,
                       run_sweep)
from .storage import PolicyKind

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INVARIANT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmstore",
        description="Risk-aware swarm storage simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario sweep")
    p_run.add_argument("scenario",
                       help="scenario file path or bundled scenario name")
    p_run.add_argument("--seed-count", type=int, default=None,
                       help="use only the first N seeds of the scenario")
    p_run.add_argument("--policy", choices=[p.value for p in PolicyKind],
                       default=None, help="restrict the sweep to one policy")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--quiet", action="store_true",
                       help="suppress per-run progress lines")

    p_cmp = sub.add_parser("compare", help="compare policies across summaries")
    p_cmp.add_argument("summary", nargs="+", help="summary CSV files")

    sub.add_parser("catalog", help="list bundled scenarios")
    return parser


def _load_scenario(ref: str):
    if os.path.exists(ref):
        return parse_scenario(ref)
    if os.path.sep not in ref and not ref.endswith(".scenario"):
        return load_bundled(ref)
    raise ConfigurationError(f"scenario file not found: {ref}")


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario)
    values = dict(scenario.values)
    if args.seed_count is not None:
        if args.seed_count < 1:
            raise ConfigurationError("--seed-count must be >= 1")
        values["seeds"] = scenario.seeds[:args.seed_count]
        if len(values["seeds"]) < args.seed_count:
            raise ConfigurationError(
                f"scenario defines only {len(scenario.seeds)} seeds")
    if args.policy is not None:
        values["policies"] = (PolicyKind(args.policy),)
    scenario = type(scenario)(values=values)

    def progress(policy, seed, stats):
        if not args.quiet:
            hops = "n/a" if stats.mean_hops is None else f"{stats.mean_hops:.2f}"
            print(f"{scenario.name} {policy.value} seed={seed} "
                  f"reliability={stats.reliability_end:.4f} hops={hops}")

    summary = run_sweep(scenario, out_dir=args.out, progress=progress)
    out = args.out or scenario.out_dir
    print(f"wrote {len(summary.runs)} series files and "
          f"{scenario.name}_summary.csv to {out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    rows = []
    for path in args.summary:
        parsed, _ = read_summary_csv(path)
        rows.extend(parsed)
    report = compare_policies(rows)
    print(format_comparison(report))
    return EXIT_OK


def _cmd_catalog(_args) -> int:
    for name in catalog():
        print(name)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "compare": _cmd_compare, "catalog": _cmd_catalog}
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccountingError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

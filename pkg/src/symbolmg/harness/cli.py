"""Command line: ``run``, ``check`` and ``bound``."""
from __future__ import annotations

import argparse
import logging
import sys

from ..multigrid import HierarchyError, tgm_bound
from ..symbol import projector_symbol
from .config import load_config, merge
from .emit import emit, format_table
from .experiments import ExperimentSpec, builtin_registry, get_experiment, run_experiment
from .suites import SUITES, run_suites

log = logging.getLogger("symbolmg")


def _sizes(text):
    if text is None or isinstance(text, (list, tuple)):
        return text
    return [int(s) for s in str(text).split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symbolmg",
                                     description="Symbol-based multigrid for circulant and Toeplitz systems.")
    parser.add_argument("--config", help="YAML or JSON file with option values (flags win)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run registry experiments and write the result table")
    run.add_argument("--experiment", help="experiment id or 'all'")
    run.add_argument("--g", type=int)
    run.add_argument("--theta", type=int)
    run.add_argument("--sizes", type=_sizes, help="comma-separated sizes, e.g. 81,243")
    run.add_argument("--tol", type=float)
    run.add_argument("--max-iter", dest="max_iter", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="output directory (table printed to stdout when omitted)")
    run.add_argument("--format", choices=["csv"])

    check = sub.add_parser("check", help="run the dense verification suites")
    check.add_argument("--suite", choices=[*SUITES, "all"])

    bound = sub.add_parser("bound", help="print the two-grid constants of an experiment")
    bound.add_argument("--experiment")
    return parser


def _select(options) -> list[ExperimentSpec]:
    wanted = options.get("experiment") or "all"
    custom = [ExperimentSpec.from_dict(d) for d in options.get("experiments", []) or []]
    pool = {s.id.lower(): s for s in builtin_registry() + custom}
    if str(wanted).lower() == "all":
        return list(pool.values())
    if str(wanted).lower() not in pool:
        raise KeyError(f"unknown experiment {wanted!r}")
    return [pool[str(wanted).lower()]]


def _override(exp: ExperimentSpec, options) -> ExperimentSpec:
    changes = {}
    for key in ("g", "theta", "tol", "max_iter", "seed"):
        if options.get(key) is not None:
            changes[key] = options[key]
    if options.get("sizes"):
        changes["sizes"] = tuple(_sizes(options["sizes"]))
    return exp.replace(**changes) if changes else exp


def cmd_run(options) -> int:
    rows = []
    for exp in _select(options):
        rows.extend(run_experiment(_override(exp, options)))
    out = options.get("out")
    if out:
        paths = emit(rows, out, options.get("format") or "csv")
        print(f"wrote {paths[0]} and {len(paths) - 1} residual histories")
    else:
        sys.stdout.write(format_table(rows))
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"{r.experiment} n={r.n} {r.cycle}: {r.error}", file=sys.stderr)
    return 1 if failed else 0


def cmd_check(options) -> int:
    suite = options.get("suite") or "all"
    names = list(SUITES) if suite == "all" else [suite]
    results = run_suites(names)
    for r in results:
        print(r.line())
    bad = sum(not r.ok for r in results)
    print(f"{len(results) - bad}/{len(results)} checks passed")
    return 1 if bad else 0


def cmd_bound(options) -> int:
    exps = _select(options)
    status = 0
    for exp in exps:
        f = exp.symbol()
        zeros = exp.zero_list()
        p = projector_symbol(zeros, exp.g)
        try:
            b = tgm_bound(f, p, exp.g, zeros=zeros)
        except (HierarchyError, ValueError) as exc:
            print(f"{exp.id}: {exc}")
            status = 1
            continue
        print(f"{exp.id}: alpha_post={b.alpha_post:.6g} gamma={b.gamma:.6g} rho={b.rho:.6g}")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "verbose", "command")}
    config = load_config(args.config) if args.config else {}
    options = merge(config, flags)
    handlers = {"run": cmd_run, "check": cmd_check, "bound": cmd_bound}
    try:
        return handlers[args.command](options)
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

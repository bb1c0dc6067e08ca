"""Command-line front end (``cfsim``).

Exit codes: 0 success, 2 usage or configuration error, 3 computational
failure (e.g. exhaustive-search budget exceeded), 4 validation failure.
Rates are reported in bits per real channel use (log base 2).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .core import BudgetExceededError, CFError, ConvergenceError, as_channel, as_coefficients
from .experiments import (
    ExperimentConfig,
    SummaryRow,
    resolve_workers,
    run_bounds_vs_power,
    run_scheduled_sum_rate,
    run_sum_rate_vs_users,
    run_unit_vector_probability,
)
from .rate import alpha_mmse, computation_rate, quadratic_form
from .search import DEFAULT_BUDGET, SOLVERS, find_optimal
from .tables import OutputTable
from .validation import run_validation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3
EXIT_VALIDATION = 4

RATE_UNITS = "bits per real channel use (log2)"

CAMPAIGN_DEFAULTS = {
    "prob-unit": dict(users=[4, 8, 16, 32], relays=1, power=[10.0], trials=10_000, norm_sq=[2, 4, 9]),
    "sumrate": dict(users=[2, 3, 4, 5, 6, 8, 10, 12, 16, 24, 32, 48, 64], relays=4, power=[10.0, 100.0], trials=1000),
    "schedule": dict(users=[12, 24, 48, 120], relays=3, power=[10.0], group_size=3, slots=10_000),
    "bounds": dict(users=[4], relays=4, power=[3.0, 10.0, 30.0, 100.0, 300.0, 1000.0], trials=1000),
}

CAMPAIGNS = {
    "prob-unit": run_unit_vector_probability,
    "sumrate": run_sum_rate_vs_users,
    "schedule": run_scheduled_sum_rate,
    "bounds": run_bounds_vs_power,
}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"malformed real list {text!r}") from exc


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"malformed integer list {text!r}") from exc


def _add_output_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", metavar="PATH", help="write the table here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfsim", description="Compute-and-forward rate and scheduling simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="MMSE scaling, quadratic form and computation rate for one (h, a)")
    p.add_argument("--h", required=True, help="channel gains, comma separated")
    p.add_argument("--a", required=True, help="integer coefficients, comma separated")
    p.add_argument("--power", required=True, type=float)
    _add_output_flags(p)

    p = sub.add_parser("search", help="optimal coefficient vector for one channel")
    p.add_argument("--h", required=True, help="channel gains, comma separated")
    p.add_argument("--power", required=True, type=float)
    p.add_argument("--solver", choices=SOLVERS, default="auto")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="exhaustive-search node budget")
    _add_output_flags(p)

    for name, help_text in (
        ("prob-unit", "probability that the optimal vector is not a unit vector"),
        ("sumrate", "unscheduled sum-rate versus number of users"),
        ("schedule", "Round-Robin scheduled sum-rate per slot"),
        ("bounds", "optimal sum-rate against lower and upper bounds versus power"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="flat JSON config, or a JSON table produced by this tool")
        p.add_argument("--users")
        p.add_argument("--relays", type=int)
        p.add_argument("--power")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--group-size", dest="group_size", type=int)
        p.add_argument("--slots", type=int)
        p.add_argument("--solver", choices=SOLVERS)
        p.add_argument("--norm-sq", dest="norm_sq")
        p.add_argument("--progress", action="store_true", help="progress messages on stderr")
        _add_output_flags(p)

    p = sub.add_parser("validate", help="run identity, solver-agreement and distribution checks")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=2000, help="random instances for the identity checks")
    _add_output_flags(p)
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    if "metadata" in doc and isinstance(doc["metadata"], dict) and "config" in doc["metadata"]:
        doc = doc["metadata"]["config"]
    return {k.replace("-", "_"): v for k, v in doc.items()}


def resolve_config(command, args) -> ExperimentConfig:
    merged = dict(CAMPAIGN_DEFAULTS[command])
    if args.config:
        merged.update(_load_config(args.config))
    explicit = {
        "users": _ints(args.users) if args.users else None,
        "relays": args.relays,
        "power": _floats(args.power) if args.power else None,
        "trials": args.trials,
        "seed": args.seed,
        "group_size": args.group_size,
        "slots": args.slots,
        "solver": args.solver,
        "norm_sq": _ints(args.norm_sq) if args.norm_sq else None,
    }
    merged.update({k: v for k, v in explicit.items() if v is not None})
    if command == "bounds":
        merged["users"] = [merged["relays"]]
    try:
        return ExperimentConfig.from_dict(merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc


def _metadata(command, config=None, **extra):
    meta = {"command": command, "version": __version__, "rate_units": RATE_UNITS}
    if config is not None:
        meta["config"] = config
    meta.update(extra)
    return meta


def cmd_rate(args) -> OutputTable:
    h = as_channel(_floats(args.h))
    a = as_coefficients(_ints(args.a), length=h.size)
    row = [alpha_mmse(h, a, args.power), quadratic_form(h, a, args.power), computation_rate(h, a, args.power)]
    return OutputTable(
        ["alpha_mmse", "f_value", "rate_bits"],
        [row],
        _metadata("rate", {"h": h.tolist(), "a": a.tolist(), "power": args.power}),
    )


def cmd_search(args) -> OutputTable:
    h = as_channel(_floats(args.h))
    res = find_optimal(h, args.power, solver=args.solver, budget=args.budget)
    d = res.as_dict()
    return OutputTable(
        ["a_opt", "f_value", "rate_bits", "candidates_examined", "solver", "is_unit"],
        [[d["a_opt"], d["f_value"], d["rate"], d["candidates_examined"], d["solver"], d["is_unit"]]],
        _metadata("search", {"h": h.tolist(), "power": args.power, "solver": args.solver, "budget": args.budget}),
    )


def cmd_campaign(command, args, workers=None) -> OutputTable:
    cfg = resolve_config(command, args)
    progress = (lambda msg: print(msg, file=sys.stderr, flush=True)) if args.progress else None
    rows = CAMPAIGNS[command](cfg, workers=resolve_workers(workers), progress=progress)
    return OutputTable(SummaryRow.COLUMNS, [r.values() for r in rows], _metadata(command, cfg.to_dict()))


def cmd_validate(args) -> tuple[OutputTable, bool]:
    checks = run_validation(seed=args.seed, instances=args.trials)
    table = OutputTable(
        ["check", "value", "threshold", "passed"],
        [[c.name, c.value, c.threshold, c.passed] for c in checks],
        _metadata("validate", {"seed": args.seed, "trials": args.trials}),
    )
    return table, all(c.passed for c in checks)


def _emit(table: OutputTable, args):
    text = table.render(args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ok = True
    try:
        if args.command == "rate":
            table = cmd_rate(args)
        elif args.command == "search":
            table = cmd_search(args)
        elif args.command == "validate":
            table, ok = cmd_validate(args)
        else:
            table = cmd_campaign(args.command, args)
        _emit(table, args)
    except (UsageError, CFError) as exc:
        print(f"cfsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceededError, ConvergenceError, ArithmeticError) as exc:
        print(f"cfsim: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"cfsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

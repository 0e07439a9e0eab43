"""Batch command runner behind app.py.

Exit codes: 0 clean, 1 a check failed or routes disagreed, 2 configuration
or usage error, 3 budget exhausted before completion.
"""

import argparse
import logging
import sys
import time

from src import chain_enum, migrativity
from src.axioms import check_structural_props, find_2neutral, verify_axioms
from src.config import COMMANDS, DEFAULT_CHAIN, FORMATS, load_config, parse_config
from src.errors import (
    BudgetExceeded,
    ConstructionError,
    NotOnGrid,
    OutOfRange,
    ParseError,
    PreconditionViolated,
    ShapeMismatch,
    ValidationError,
)
from src.grid_domain import UnitGrid, snap
from src.operators import NeutralTriple, all_triples, discretize, evaluate_real
from src.reports import Report, write_report
from src.utils import format_value, parse_fraction

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

USAGE_ERRORS = (ParseError, ValidationError, NotOnGrid, OutOfRange, ConstructionError, PreconditionViolated, ShapeMismatch)


def setup_logging(verbose=False):
    """Configures the root logger once: stderr, '%(asctime)s - %(levelname)s - %(message)s'."""
    root = logging.getLogger()
    level = logging.DEBUG if verbose else logging.INFO
    root.setLevel(level)
    if not any(getattr(h, "_migrativity_cli", False) for h in root.handlers):
        console = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s', datefmt='%Y-%m-%d %H:%M:%S')
        console.setFormatter(formatter)
        console._migrativity_cli = True
        root.addHandler(console)
    for handler in root.handlers:
        if getattr(handler, "_migrativity_cli", False):
            handler.setLevel(level)
    return root


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _table_and_triple(cfg, operator_key, triple_key):
    name, spec = cfg.operator(operator_key)
    table = discretize(spec, cfg.grid)
    triple = cfg.triple(triple_key, spec)
    if triple is None:
        found = find_2neutral(table)
        if not found:
            raise PreconditionViolated(f"operator '{name}' has no 2-neutral element on grid n={cfg.grid.n}")
        triple = found[0]
    return name, table, triple


def _echo(cfg, **extra):
    echo = {"grid": cfg.grid.n, "mode": cfg.tolerance.mode.value}
    for key in sorted(cfg.params):
        echo[key] = cfg.params[key][0]
    echo.update(extra)
    return echo


def _verify(cfg, report):
    name, spec = cfg.operator("operator")
    table = discretize(spec, cfg.grid)
    axioms = verify_axioms(table)
    for check in ("commutative", "associative", "monotone"):
        result = getattr(axioms, check)
        report.add({
            "record": "axiom", "operator": name, "check": check, "holds": result.holds,
            "witness": None if result.witness is None else list(result.witness),
        })
    found = [str(t) for t in axioms.triples]
    report.add({"record": "triples", "operator": name, "triples": found})
    wanted = cfg.triple("triple", spec)
    if wanted is not None and str(wanted) not in found:
        report.failed = True
        report.notes.append(f"triple {wanted} is not a 2-neutral element of '{name}'")
    structural_ok = True
    if axioms.passed:
        for triple in axioms.triples:
            structural = check_structural_props(table, triple, assume_verified=True)
            structural_ok = structural_ok and structural.passed
            for item in structural.items:
                report.add({
                    "record": "structural", "operator": name, "triple": str(triple), "item": item.item,
                    "holds": item.holds, "witness": None if item.witness is None else list(item.witness),
                })
    report.failed = report.failed or not axioms.passed or not structural_ok
    report.summary = {"operator": name, "is_2uninorm": axioms.passed, "triples": len(found)}


def _pair_records(p, point, report):
    identity = p.identity()
    for verdict in (point.brute, point.lower, point.upper, point.specialization):
        if verdict is not None:
            report.add({"record": "verdict", **identity, **verdict.as_record(p.n)})


def _migrative(cfg, report):
    name1, u1, triple1 = _table_and_triple(cfg, "u1", "triple1")
    name2, u2, triple2 = _table_and_triple(cfg, "u2", "triple2")
    alpha = cfg.point("alpha")
    p = migrativity.make_pair(u1, triple1, u2, triple2, alpha, name1, name2)
    point = migrativity.migrativity_at(p)
    _pair_records(p, point, report)

    pivots = migrativity.pivot_values(p)
    checks = {
        "single-pivot": migrativity.check_single_pivot_rule(p, point.brute),
        "split-pivot": migrativity.check_split_pivot_rule(p, point.brute),
    }
    if point.brute.migrative:
        checks["anchor-bounds"] = migrativity.check_anchor_bounds(p, point.brute)
        checks["pivot-identity"] = migrativity.check_pivot_identity(p, point.brute)
    for check, result in checks.items():
        report.add({"record": "rule", **p.identity(), "check": check, "outcome": result.outcome.value,
                    "items": list(result.items), "failed": list(result.failed)})
    bounds = migrativity.check_pivot_bounds(u2, triple1, alpha)
    report.add({"record": "pivot-bounds", **p.identity(), "holds": bounds.holds,
                "strict_holds": bounds.strict_holds,
                "violations": [{"item": item, "boundary": boundary} for item, boundary in bounds.violations]})

    rules_ok = all(result.holds for result in checks.values()) and bounds.strict_holds
    report.failed = not (point.agree and rules_ok)
    report.summary = {"migrative": point.brute.migrative, "pivots": str(pivots), "agree": point.agree}


def _sweep(cfg, report):
    name1, u1, triple1 = _table_and_triple(cfg, "u1", "triple1")
    name2, u2, triple2 = _table_and_triple(cfg, "u2", "triple2")
    points = migrativity.sweep_alpha(u1, triple1, u2, triple2, name1, name2)
    for point in points:
        for verdict in (point.brute, point.lower, point.upper, point.specialization):
            if verdict is None:
                continue
            report.add({
                "record": "sweep-point",
                "alpha": str(point.alpha),
                "verdict": "migrative" if verdict.migrative else "not-migrative",
                "route": verdict.route.value,
                "case": verdict.case,
            })
    report.notes.append("alpha values are closed grid points; an interval (p,q] means the grid points in it")
    disagreeing = [str(p.alpha) for p in points if not p.agree]
    report.failed = bool(disagreeing)
    report.summary = {
        "u1": name1, "triple1": str(triple1), "u2": name2, "triple2": str(triple2),
        "migrative_alphas": [str(p.alpha) for p in points if p.brute.migrative],
        "disagreeing_alphas": disagreeing,
    }


def _chain_triple(cfg, grid):
    if "triple" not in cfg.params:
        return None
    text, line = cfg.params["triple"]
    parts = text.split()
    if len(parts) != 3:
        raise ValidationError(f"'triple' needs three values 'e a f', got '{text}'", line=line)
    try:
        return NeutralTriple.from_values(grid, *(parse_fraction(part) for part in parts))
    except ValueError as e:
        raise ValidationError(f"'triple' on chain n={grid.n}: {e}", line=line) from e


def _deadline(cfg):
    return None if cfg.budget is None else time.monotonic() + cfg.budget


def _chain_size(cfg):
    return cfg.integer("chain", DEFAULT_CHAIN, minimum=1, maximum=chain_enum.DEFAULT_MAX_N)


def _enumerate(cfg, report):
    chain = UnitGrid(_chain_size(cfg))
    wanted = _chain_triple(cfg, chain)
    triples = all_triples(chain) if wanted is None else [wanted]
    naive = cfg.flag("naive")
    deadline = _deadline(cfg)
    total = 0
    mismatches = []
    for triple in triples:
        job = chain_enum.EnumJob(chain, triple, deadline=deadline)
        try:
            result = chain_enum.enumerate_2uninorms(job)
        except BudgetExceeded as e:
            result = e.partial
            report.complete = False
        for index, table in enumerate(result.tables):
            report.add({"record": "table", "triple": str(triple), "index": index, "signature": table.signature()})
        report.add({"record": "enum-stats", "triple": str(triple), **result.stats.as_dict()})
        total += len(result.tables)
        if naive and report.complete:
            oracle = chain_enum.enumerate_naive(job)
            if [t.key for t in oracle.tables] != [t.key for t in result.tables]:
                mismatches.append(str(triple))
        if not report.complete:
            break
    report.failed = bool(mismatches)
    report.summary = {"chain": chain.n, "triples": len(triples), "tables": total, "naive_mismatches": mismatches}


def _audit(cfg, report):
    n = _chain_size(cfg)
    census = chain_enum.census_audit(n, jobs=cfg.jobs, budget=cfg.budget, progress=cfg.progress)
    audit = census.audit
    for record in audit.disagreements + audit.intra_disagreements + audit.rule_violations:
        report.add(record)
    for record in audit.pivot_bound_violations.values():
        report.add(record)
    for record in census.structural_failures:
        report.add(record)
    report.failed = not census.clean
    report.complete = census.complete
    report.summary = census.summary()
    report.summary.pop("complete", None)
    report.echo["enum_stats"] = census.enum_stats


def _heatmap(cfg, report):
    name, spec = cfg.operator("operator")
    table = discretize(spec, cfg.grid)
    values = [[format_value(cfg.grid.value(int(v))) for v in row] for row in table.entries]
    report.table = values
    for i, row in enumerate(values):
        report.add({"record": "row", "x": format_value(cfg.grid.value(i)), "values": row})
    report.summary = {"operator": name, "size": f"{cfg.grid.size}x{cfg.grid.size}"}


def _evaluate(cfg, report):
    name, spec = cfg.operator("operator")
    x, y = cfg.literal("x"), cfg.literal("y")
    for label, value in (("x", x), ("y", y)):
        if not 0 <= value <= 1:
            raise OutOfRange(f"{label}={value} outside [0,1]")
    value = evaluate_real(spec, x, y)
    shown = format_value if cfg.tolerance.exact else repr
    record = {"record": "evaluation", "operator": name, "x": shown(x), "y": shown(y)}
    if cfg.tolerance.exact:
        point = snap(value, cfg.grid)
        record.update({"value": format_value(value), "grid_point": str(point)})
    else:
        record["value"] = repr(float(value))
        try:
            record["grid_point"] = str(snap(value, cfg.grid, cfg.tolerance))
        except NotOnGrid:
            record["grid_point"] = None
            report.notes.append(f"no carrier point of grid n={cfg.grid.n} within eps={cfg.tolerance.eps}")
    report.add(record)
    report.summary = {"operator": name, "value": record["value"]}


_COMMANDS = {
    "verify": _verify,
    "migrative": _migrative,
    "sweep": _sweep,
    "enumerate": _enumerate,
    "audit": _audit,
    "heatmap": _heatmap,
    "evaluate": _evaluate,
}


def run_command(cfg):
    """
    Runs the configured command.
    Args:
        cfg (RunConfig): A parsed configuration with a command.
    Returns:
        Report: failed=True when a check failed or routes disagreed; complete=False when a budget ran out.
    Raises:
        ValidationError: When no command is configured or a parameter is missing.
    """
    if cfg.command not in _COMMANDS:
        raise ValidationError(f"no command configured (choose one of {', '.join(COMMANDS)})")
    started = time.monotonic()
    report = Report(cfg.command, echo=_echo(cfg))
    logger.info(f"Running '{cfg.command}' on grid n={cfg.grid.n} ({cfg.tolerance.mode.value} mode).")
    _COMMANDS[cfg.command](cfg, report)
    report.timing = {"elapsed_seconds": round(time.monotonic() - started, 3)}
    if report.failed:
        logger.warning(f"Command '{cfg.command}' finished with failed checks.")
    return report


def exit_code(report):
    if report.failed:
        return EXIT_FAILED
    if not report.complete:
        return EXIT_BUDGET
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(description="2-uninorm migrativity verifier on finite grids")
    parser.add_argument("--config", help="Path to the run configuration")
    parser.add_argument("--command", choices=COMMANDS, help="Command to run (overrides [run] command)")
    parser.add_argument("--grid", type=int, help="Grid size n (overrides [run] grid)")
    parser.add_argument("--mode", choices=("exact", "float"), help="Scalar comparison mode")
    parser.add_argument("--out", help="Write the report here instead of stdout")
    parser.add_argument("--format", choices=FORMATS, help="Report format")
    parser.add_argument("--budget", type=float, help="Wall-clock budget in seconds for enumerate/audit")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes for audit (enumerate always runs in one process)")
    parser.add_argument("--quiet", action="store_true", help="No progress bars")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def main(argv=None, stdout=None):
    """Parses arguments, runs the command, writes the report and returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    stdout = stdout if stdout is not None else sys.stdout.buffer

    if args.grid is not None and args.grid < 1:
        logger.error(f"--grid must be a positive integer, got {args.grid}")
        return EXIT_USAGE
    if args.jobs < 1:
        logger.error(f"--jobs must be at least 1, got {args.jobs}")
        return EXIT_USAGE

    overrides = {
        "grid_override": args.grid,
        "mode_override": args.mode,
        "command_override": args.command,
        "format_override": args.format,
    }
    try:
        cfg = load_config(args.config, **overrides) if args.config else parse_config("", **overrides)
        cfg.out = args.out
        cfg.budget = args.budget
        cfg.jobs = args.jobs
        cfg.progress = not args.quiet and sys.stderr.isatty()
        report = run_command(cfg)
    except USAGE_ERRORS as e:
        logger.error(f"Error: {e}")
        return EXIT_USAGE
    except BudgetExceeded as e:
        logger.error(f"Budget exhausted: {e}")
        return EXIT_BUDGET

    try:
        write_report(report, cfg.output_format, cfg.out, stdout)
    except OSError:
        return EXIT_USAGE
    return exit_code(report)


# -*- coding: utf-8 -*-
"""
Subcommands of ``grid_defense``.

Exit codes: 0 success, 1 invalid input, 2 solver or consistency
failure, 3 not converged.  Machine outputs go to the output directory;
the human summary goes to stdout.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections import OrderedDict

import simplejson

from src import __version__
from src.cli.run_config import SWEEP_PARAMETERS, RunConfig
from src.cli.sweep import budget_threshold, point_failed, run_sweep
from src.core.config_loader import load_defense_config
from src.core.exceptions import (CaseError, GridDefenseError, OracleSizeError,
                                 UncertaintyError)
from src.core.log_setup import configure_logging
from src.grid.case_codec import serialize_case
from src.optimization.ccg import CONVERGED, ccg_solve
from src.optimization.oracle import oracle_solve, validate_extreme_points
from src.optimization.random_cases import random_cases
from src.reporting.csv_writers import write_convergence_csv, write_sweep_csv
from src.reporting.report_generator import render_comparison, render_defense_summary
from src.reporting.result_document import ResultDocument, write_result
from src.solver.backend import get_backend

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_SOLVER_FAILURE = 2
EXIT_NOT_CONVERGED = 3

ORACLE_MATCH_TOL_MW = 1e-5


def exit_code_for(error):
    if isinstance(error, (CaseError, UncertaintyError, OracleSizeError, ValueError)):
        return EXIT_INVALID_INPUT
    return EXIT_SOLVER_FAILURE


def _print(text=""):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(config):
    case = config.load_case()
    report = ccg_solve(case, config.ccg, get_backend(config.backend),
                       dump_dir=config.models_dir())
    write_result(ResultDocument.from_report(report, case, config.case_name),
                 config.output_path("result.json"))
    write_convergence_csv(report, config.output_path("convergence.csv"))
    _print(render_defense_summary(report, case, with_realization=True))
    return EXIT_OK if report.status == CONVERGED else EXIT_NOT_CONVERGED


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(config, parameter=None, values=None):
    parameter = parameter or config.sweep_parameter
    values = list(values if values is not None else config.sweep_values)
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError("unknown sweep parameter %r" % parameter)
    if not values:
        raise ValueError("sweep needs at least one value")
    case = config.load_case()
    rows = run_sweep(case, parameter, values, config.ccg, jobs=config.jobs,
                     backend_name=config.backend)
    write_sweep_csv(rows, config.output_path("sweep.csv"))
    for row in rows:
        loss = row["load_loss_mw"]
        _print("%s=%-8s %10s MW  %s" % (parameter, row["value"],
                                        "%.2f" % loss if loss != "" else "-", row["status"]))
    if config.loss_threshold is not None and parameter == "defense_budget":
        answer = budget_threshold(rows, config.loss_threshold)
        if answer is None:
            _print("No swept defense budget keeps the loss below %.2f MW" % config.loss_threshold)
        else:
            _print("Minimum defense budget keeping the loss below %.2f MW: %s" % (
                config.loss_threshold, answer))
    if any(point_failed(r) for r in rows):
        return EXIT_SOLVER_FAILURE
    if any(r["status"] != CONVERGED for r in rows):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle-check
# ---------------------------------------------------------------------------

def cmd_oracle_check(config):
    if config.random_instances:
        cases = [("random-%02d" % i, c) for i, c in
                 enumerate(random_cases(config.random_instances, config.seed), start=1)]
    else:
        cases = [(config.case_name, config.load_case())]
    backend = get_backend(config.backend)
    passed = 0
    for label, case in cases:
        try:
            expected = oracle_solve(case, config.oracle_caps, backend)
        except OracleSizeError as e:
            _print("%s: REFUSED (%s)" % (label, e))
            return EXIT_INVALID_INPUT
        report = ccg_solve(case, config.ccg, backend)
        diff = abs(report.final_loss - expected.worst_case_loss)
        ok = report.status == CONVERGED and diff <= ORACLE_MATCH_TOL_MW
        line = "%s: %s  ccg=%.6f oracle=%.6f diff=%.2e" % (
            label, "PASS" if ok else "FAIL", report.final_loss, expected.worst_case_loss, diff)
        if ok and config.samples:
            points = validate_extreme_points(case, report.final_defense, config.samples,
                                             config.seed, backend,
                                             cap=config.oracle_caps.max_realizations)
            ok = points.ok
            line += "  extreme-points=%s" % ("ok" if points.ok else
                                             "%d counterexample(s)" % len(points.counterexamples))
        passed += ok
        _print(line)
    _print("%d/%d passed" % (passed, len(cases)))
    return EXIT_OK if passed == len(cases) else EXIT_SOLVER_FAILURE


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(config):
    case = config.load_case()
    if config.normalize:
        _print(serialize_case(case, name=config.case_name))
        return EXIT_OK
    _print("%s: OK  %d buses, %d branches, %d generators, %d wind farms, %d loads" % (
        config.case_name, len(case.buses), len(case.branches), len(case.generators),
        len(case.wind_farms), len(case.loads)))
    _print("  expected load %.1f MW, generation capacity %.1f MW" % (
        case.total_expected_load(), case.total_capacity()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def cmd_compare(config):
    """Attacks with uncertainty, attacks only, uncertainty only."""
    case = config.load_case()
    backend = get_backend(config.backend)
    runs = OrderedDict([
        ("attacks+uncertainty", case),
        ("attacks only", case.with_budgets(load_uncertainty_budget=0.0,
                                           wind_uncertainty_budget=0.0)),
        ("uncertainty only", case.with_budgets(attack_budget=0.0)),
    ])
    reports = OrderedDict((label, ccg_solve(c, config.ccg, backend)) for label, c in runs.items())

    doc = OrderedDict((label, ResultDocument.from_report(reports[label], runs[label],
                                                         config.case_name).to_dict())
                      for label in runs)
    path = config.output_path("compare.json")
    with open(path, "w", encoding="utf-8") as f:
        f.write(simplejson.dumps(doc, indent=2) + "\n")

    labelled = [(label, reports[label]) for label in ("attacks+uncertainty", "attacks only")]
    footer = "Load loss with uncertainty only (no attacks): %.2f MW" % (
        reports["uncertainty only"].final_loss)
    _print(render_comparison(labelled, case, footer=footer))
    if any(r.status != CONVERGED for r in reports.values()):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


COMMANDS = OrderedDict([
    ("solve", cmd_solve),
    ("sweep", cmd_sweep),
    ("oracle-check", cmd_oracle_check),
    ("validate", cmd_validate),
    ("compare", cmd_compare),
])


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_case_flags(parser):
    parser.add_argument("--case", metavar="PATH",
                        help="case document (default: built-in modified RTS-79)")
    parser.add_argument("--defense-budget", type=float, metavar="R")
    parser.add_argument("--attack-budget", type=float, metavar="R")
    parser.add_argument("--ud", type=float, metavar="N", help="load uncertainty budget")
    parser.add_argument("--uw", type=float, metavar="N", help="wind uncertainty budget")
    parser.add_argument("--load-dev", type=float, metavar="MW",
                        help="up/down deviation applied to every load")
    parser.add_argument("--wind-dev", type=float, metavar="FRACTION",
                        help="up/down wind deviation as a fraction of expected output")


def _add_solver_flags(parser):
    parser.add_argument("--gap-abs", type=float, metavar="MW")
    parser.add_argument("--max-iters", type=int, metavar="N")
    parser.add_argument("--big-m-scale", type=float, metavar="FACTOR")
    parser.add_argument("--backend", help="solver backend (highs, bnb)")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--dump-models", action="store_true",
                        help="write every master/subproblem model to OUT/models")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="grid_defense",
        description="Defense planning against coordinated attacks and load/wind uncertainty.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("--config", metavar="PATH", help="INI configuration file")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one case with C&CG")
    _add_case_flags(solve)
    _add_solver_flags(solve)
    solve.add_argument("--conventional", action="store_true",
                       help="ignore load and wind uncertainty (ud = uw = 0)")

    sweep = sub.add_parser("sweep", help="one solve per parameter value")
    sweep.add_argument("parameter", choices=SWEEP_PARAMETERS)
    sweep.add_argument("values", type=float, nargs="+")
    _add_case_flags(sweep)
    _add_solver_flags(sweep)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--loss-threshold", type=float, metavar="MW",
                       help="report the minimum defense budget keeping loss below MW")

    oracle = sub.add_parser("oracle-check", help="compare C&CG with exhaustive enumeration")
    _add_case_flags(oracle)
    _add_solver_flags(oracle)
    oracle.add_argument("--random", type=int, metavar="N", help="check N random small instances")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--samples", type=int, default=0,
                        help="also sample N interior realizations per instance")

    validate = sub.add_parser("validate", help="lint a case document")
    _add_case_flags(validate)
    validate.add_argument("--normalize", action="store_true",
                          help="print the canonical case document")

    compare = sub.add_parser("compare", help="attacks and uncertainty against each alone")
    _add_case_flags(compare)
    _add_solver_flags(compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    config_file = load_defense_config(args.config)
    configure_logging(config_file, verbose=args.verbose)
    config_file.dump()
    try:
        config = RunConfig.from_args(args, config_file)
        return COMMANDS[args.command](config)
    except (GridDefenseError, ValueError) as e:
        log.error("%s failed: %s", args.command, e)
        sys.stderr.write("error: %s\n" % e)
        return exit_code_for(e)

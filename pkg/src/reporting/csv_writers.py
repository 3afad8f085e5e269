# -*- coding: utf-8 -*-
"""
CSV outputs: per-iteration convergence and per-point sweep rows.

Both files are plain ``csv.excel`` with a header line.  Column lists
are fixed; ``schemas/sweep.columns.json`` publishes the sweep contract.
"""
from __future__ import annotations

import csv
import logging
import os

import simplejson

from src.optimization.ccg import CONVERGENCE_COLUMNS

log = logging.getLogger(__name__)

SWEEP_COLUMNS_FILE = os.path.join(os.path.dirname(__file__), "schemas", "sweep.columns.json")


def _load_sweep_contract():
    with open(SWEEP_COLUMNS_FILE, "r", encoding="utf-8") as f:
        return simplejson.load(f)


_SWEEP_CONTRACT = _load_sweep_contract()
SWEEP_COLUMNS = tuple(_SWEEP_CONTRACT["columns"])
LIST_SEPARATOR = _SWEEP_CONTRACT["list_separator"]


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def format_ids(ids):
    """``"1 5 7"``; empty sets become an empty cell."""
    return LIST_SEPARATOR.join(str(i) for i in ids)


def write_convergence_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CONVERGENCE_COLUMNS)
        for row in report.convergence_rows():
            writer.writerow([_fmt(v) for v in row])
    log.info("Wrote %s (%d iterations)", path, len(report.iterations))
    return path


def write_sweep_csv(rows, path):
    """*rows* are dicts keyed by ``SWEEP_COLUMNS``, already in input order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in SWEEP_COLUMNS})
    log.info("Wrote %s (%d points)", path, len(rows))
    return path


def format_elements(branch_ids, gen_ids):
    """``"L25 G20 G21"``: lines then generators, ascending."""
    return format_ids(["L%s" % i for i in sorted(branch_ids)]
                      + ["G%s" % i for i in sorted(gen_ids)])

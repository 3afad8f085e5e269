# -*- coding: utf-8 -*-
"""
Sensitivity sweeps: one full C&CG solve per parameter value.

Points run in a ``multiprocessing`` pool of ``jobs`` workers.  Each
worker, or the calling process for a serial sweep, holds a one-slot
``BackendPool`` that its points check a backend out of.  Rows come back
in input order whatever the completion order; a failing point is
recorded in its row and the other points still run.
"""
from __future__ import annotations

import logging
import multiprocessing

from src.core.exceptions import GridDefenseError
from src.cli.run_config import apply_sweep_value
from src.optimization.ccg import ccg_solve
from src.reporting.csv_writers import format_elements
from src.solver.backend import BackendPool

log = logging.getLogger(__name__)

FAILED = "failed"

_WORKER_POOL = None


def _init_worker(backend_name):
    global _WORKER_POOL
    _WORKER_POOL = BackendPool(backend_name, size=1)


def _run_point(task):
    case, parameter, value, params = task
    row = {"value": value, "load_loss_mw": "", "defended": "", "attacked": "",
           "iterations": "", "status": FAILED}
    try:
        point_case = apply_sweep_value(case, parameter, value)
        with _WORKER_POOL.acquire() as backend:
            report = ccg_solve(point_case, params, backend)
    except (GridDefenseError, ValueError) as e:
        log.error("Sweep point %s=%r failed: %s", parameter, value, e)
        row["status"] = "%s: %s" % (FAILED, type(e).__name__)
        return row
    row.update(
        load_loss_mw=report.final_loss,
        defended=format_elements(report.final_defense.defended_branch_ids(point_case),
                                 report.final_defense.defended_gen_ids(point_case)),
        attacked=format_elements(report.worst_attack.attacked_branch_ids(point_case),
                                 report.worst_attack.attacked_gen_ids(point_case)),
        iterations=len(report.iterations),
        status=report.status,
    )
    log.info("Sweep point %s=%r: %.4f MW (%s)", parameter, value, report.final_loss, report.status)
    return row


def run_sweep(case, parameter, values, params, jobs=1, backend_name=None):
    """Rows for ``sweep.csv``, one per value, in input order."""
    tasks = [(case, parameter, value, params) for value in values]
    if jobs <= 1 or len(tasks) <= 1:
        _init_worker(backend_name)
        return [_run_point(task) for task in tasks]
    with multiprocessing.Pool(processes=min(jobs, len(tasks)), initializer=_init_worker,
                              initargs=(backend_name,)) as pool:
        return pool.map(_run_point, tasks)


def point_failed(row):
    return str(row["status"]).startswith(FAILED)


def budget_threshold(rows, threshold_mw):
    """Smallest swept value whose loss stays below *threshold_mw*, or
    ``None``.  *rows* need ``value`` and ``load_loss_mw``."""
    passing = [float(r["value"]) for r in rows
               if r.get("load_loss_mw") not in ("", None)
               and float(r["load_loss_mw"]) < threshold_mw]
    if not passing:
        return None
    best = min(passing)
    return int(best) if best.is_integer() else best

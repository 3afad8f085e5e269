# -*- coding: utf-8 -*-
"""
Human-readable defense summaries.

The summary table lists the load loss and the defended and attacked
lines and generators by case id, ascending, with ``N/A`` for an empty
set.  Several runs can share one table, one column per run, for the
coordination comparison.  Rendering is a pure function of its inputs.
"""
from __future__ import annotations

import logging
import os

import jinja2

from src.reporting.result_document import realization_rows

log = logging.getLogger(__name__)

TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")
SUMMARY_TEMPLATE = "defense_summary.txt.j2"

EMPTY_CELL = "N/A"

ROW_LABELS = ("Load loss (MW)", "Defended lines", "Defended generators",
              "Attacked lines", "Attacked generators")

_environment = None


def _env():
    global _environment
    if _environment is None:
        _environment = jinja2.Environment(
            loader=jinja2.FileSystemLoader(TEMPLATE_DIR),
            trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True,
            undefined=jinja2.StrictUndefined, autoescape=False)
    return _environment


def format_id_cell(ids):
    ids = sorted(ids)
    return ", ".join(str(i) for i in ids) if ids else EMPTY_CELL


def _column(report, case):
    return [
        "%.2f" % report.final_loss,
        format_id_cell(report.final_defense.defended_branch_ids(case)),
        format_id_cell(report.final_defense.defended_gen_ids(case)),
        format_id_cell(report.worst_attack.attacked_branch_ids(case)),
        format_id_cell(report.worst_attack.attacked_gen_ids(case)),
    ]


def _render(headers, columns, realization=None, realization_label="", footer=""):
    rows = [(label, [col[i] for col in columns]) for i, label in enumerate(ROW_LABELS)]
    return _env().get_template(SUMMARY_TEMPLATE).render(
        headers=headers, rows=rows, realization=realization or [],
        realization_label=realization_label, footer=footer)


def render_defense_summary(report, case, title="Value", with_realization=False):
    """Load loss plus defended/attacked lines and generators for one run."""
    realization = realization_rows(case, report.worst_realization) if with_realization else None
    footer = "Status: %s after %d iteration(s)" % (report.status, len(report.iterations))
    return _render([title], [_column(report, case)], realization, title, footer)


def render_comparison(labelled_reports, case, footer=""):
    """One column per ``(label, report)`` pair, in the given order."""
    headers = [label for label, _ in labelled_reports]
    columns = [_column(report, case) for _, report in labelled_reports]
    return _render(headers, columns, footer=footer)

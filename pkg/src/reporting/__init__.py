# -*- coding: utf-8 -*-
"""
Reporting: result documents with schema checks, CSV outputs and the
text defense summary.
"""
from __future__ import annotations

from .result_document import ResultDocument, case_fingerprint, validate_result, write_result
from .csv_writers import SWEEP_COLUMNS, write_convergence_csv, write_sweep_csv
from .report_generator import render_comparison, render_defense_summary

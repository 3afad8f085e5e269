# -*- coding: utf-8 -*-
"""
Tests for src/reporting: result documents, CSV outputs and the text
defense summary.
"""
from __future__ import annotations

import csv

import jsonschema
import pytest
import simplejson

from src.core.itertools_helpers import DOWN, UP
from src.grid.uncertainty import UncertaintyRealization
from src.optimization.ccg import CONVERGED, CONVERGENCE_COLUMNS, CcgReport, IterationRecord
from src.optimization.plans import AttackPlan, DefensePlan
from src.reporting.csv_writers import (
    SWEEP_COLUMNS,
    format_elements,
    format_ids,
    write_convergence_csv,
    write_sweep_csv,
)
from src.reporting.report_generator import (
    EMPTY_CELL,
    format_id_cell,
    render_comparison,
    render_defense_summary,
)
from src.reporting.result_document import (
    ResultDocument,
    case_fingerprint,
    dumps_result,
    realization_rows,
    validate_result,
    write_result,
)


def _report(case, defense=None, attack=None, realization=None, loss=50.0, status=CONVERGED):
    defense = defense or DefensePlan.empty(case)
    attack = attack or AttackPlan.from_ids(case, branches=[1])
    realization = realization or UncertaintyRealization.from_moves(case, [(0, UP)], [(0, DOWN)])
    records = (
        IterationRecord(1, 0.0, loss + 10.0, loss + 10.0, defense, "v:011|1|z:1001", 0.01, 0.02),
        IterationRecord(2, loss, loss, loss, defense, "v:011|1|z:1001", 0.01, 0.02),
    )
    return CcgReport(iterations=records, final_defense=defense, final_loss=loss,
                     worst_attack=attack, worst_realization=realization, status=status,
                     total_time_s=0.5)


# ============================================================================
# Text summary
# ============================================================================


class TestDefenseSummary:

    def test_id_cells(self):
        assert format_id_cell([]) == EMPTY_CELL == "N/A"
        assert format_id_cell([12, 3, 7]) == "3, 7, 12"

    def test_rows(self, three_bus_case):
        text = render_defense_summary(_report(three_bus_case), three_bus_case)
        lines = text.splitlines()
        assert lines[0].split() == ["Result", "Value"]
        assert lines[2].startswith("Load loss (MW)") and lines[2].endswith("50.00")
        assert lines[3].startswith("Defended lines") and lines[3].endswith("N/A")
        assert lines[5].startswith("Attacked lines") and lines[5].endswith("1")
        assert lines[6].endswith("N/A")
        assert text.rstrip().endswith("Status: converged after 2 iteration(s)")

    def test_sorted_ids(self, three_bus_case):
        defense = DefensePlan.from_ids(three_bus_case, branches=[3, 1])
        text = render_defense_summary(_report(three_bus_case, defense=defense), three_bus_case)
        assert "1, 3" in text

    def test_realization_section(self, three_bus_case):
        text = render_defense_summary(_report(three_bus_case), three_bus_case,
                                      title="Case", with_realization=True)
        assert "Worst-case realization (Case)" in text
        assert "+20.00 MW" in text
        assert "-10.00 MW" in text

    def test_deterministic(self, three_bus_case):
        report = _report(three_bus_case)
        assert render_defense_summary(report, three_bus_case) == \
            render_defense_summary(report, three_bus_case)

    def test_comparison_columns(self, three_bus_case):
        text = render_comparison([("first", _report(three_bus_case, loss=50.0)),
                                  ("second", _report(three_bus_case, loss=20.0))],
                                 three_bus_case, footer="note")
        lines = text.splitlines()
        assert lines[0].split() == ["Result", "first", "second"]
        assert lines[2].split()[-2:] == ["50.00", "20.00"]
        assert text.rstrip().endswith("note")


# ============================================================================
# Result documents
# ============================================================================


class TestResultDocument:

    def test_document_validates(self, three_bus_case):
        doc = ResultDocument.from_report(_report(three_bus_case), three_bus_case, "three").to_dict()
        validate_result(doc)
        assert list(doc)[:3] == ["schema_version", "tool_version", "case"]
        assert doc["attack"] == {"branches": [1], "generators": []}
        assert doc["convergence"][1]["lower_bound_mw"] == 50.0

    def test_realization_rows(self, three_bus_case):
        realization = UncertaintyRealization.from_moves(three_bus_case, [(0, UP)], [(0, DOWN)])
        rows = realization_rows(three_bus_case, realization)
        assert [(r["kind"], r["direction"], r["delta_mw"]) for r in rows] == [
            ("load", UP, 20.0), ("wind", DOWN, -10.0)]

    def test_fingerprint(self, three_bus_case):
        fingerprint = case_fingerprint(three_bus_case)
        assert len(fingerprint) == 64
        assert fingerprint == case_fingerprint(three_bus_case.with_budgets())
        assert fingerprint != case_fingerprint(three_bus_case.with_budgets(defense_budget=2.0))

    def test_invalid_document_is_rejected(self, three_bus_case):
        doc = ResultDocument.from_report(_report(three_bus_case), three_bus_case).to_dict()
        doc["status"] = "finished"
        with pytest.raises(jsonschema.ValidationError):
            dumps_result(doc)

    def test_write(self, tmp_path, three_bus_case):
        path = str(tmp_path / "result.json")
        write_result(ResultDocument.from_report(_report(three_bus_case), three_bus_case), path)
        with open(path, encoding="utf-8") as f:
            loaded = simplejson.load(f)
        assert loaded["load_loss_mw"] == 50.0
        assert loaded["case"]["name"] is None


# ============================================================================
# CSV outputs
# ============================================================================


class TestCsvWriters:

    def test_format_helpers(self):
        assert format_ids([]) == ""
        assert format_ids([4, 9]) == "4 9"
        assert format_elements([25], [21, 20]) == "L25 G20 G21"

    def test_convergence_csv(self, tmp_path, three_bus_case):
        path = str(tmp_path / "convergence.csv")
        write_convergence_csv(_report(three_bus_case), path)
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == CONVERGENCE_COLUMNS
        assert rows[1] == ["1", "0.0", "60.0", "v:011|1|z:1001"]
        assert len(rows) == 3

    def test_sweep_csv(self, tmp_path):
        path = str(tmp_path / "sweep.csv")
        rows = [{"value": 2.0, "load_loss_mw": 422.0, "defended": "L1 G2", "attacked": "L3",
                 "iterations": 4, "status": "converged"},
                {"value": 0.0, "status": "failed: BigMError"}]
        write_sweep_csv(rows, path)
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            assert tuple(reader.fieldnames) == SWEEP_COLUMNS
            back = list(reader)
        assert [r["value"] for r in back] == ["2.0", "0.0"]
        assert back[0]["defended"] == "L1 G2"
        assert back[1]["load_loss_mw"] == ""
        assert SWEEP_COLUMNS == ("value", "load_loss_mw", "defended", "attacked",
                                 "iterations", "status")

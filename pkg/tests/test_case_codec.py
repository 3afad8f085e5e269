# -*- coding: utf-8 -*-
"""
Tests for src/grid/case_codec.py: parsing, structural errors with
locations, and the canonical serializer.
"""
from __future__ import annotations

import os

import pytest
import simplejson

from src.core.exceptions import CaseParseError, CaseValidationError
from src.grid.case_codec import (
    FORMAT_VERSION,
    case_from_document,
    case_to_document,
    load_case,
    parse_case,
    serialize_case,
    write_case,
)
from src.grid.rts79 import make_modified_rts79

from tests.conftest import CASES_DIR, make_single_bus_case, make_three_bus_case


def _minimal_doc():
    return {
        "format": FORMAT_VERSION,
        "buses": [{"id": 1}, {"id": 2}],
        "branches": [{"id": 1, "from_bus": 1, "to_bus": 2, "reactance_x": 0.1,
                      "flow_limit": 40}],
        "generators": [{"id": 1, "bus": 1, "p_max": 50}],
        "loads": [{"id": 1, "bus": 2, "expected_mw": 30, "dev_up_mw": 5, "dev_down_mw": 5}],
        "budgets": {"attack_budget": 1},
    }


# ============================================================================
# Parsing
# ============================================================================


class TestParse:

    def test_minimal_document(self):
        case = case_from_document(_minimal_doc())
        assert case.branches[0].flow_limit == 40.0
        assert isinstance(case.generators[0].p_max, float)
        assert case.budgets.attack_budget == 1.0
        assert case.budgets.defense_budget == 0.0
        assert case.base_mva == 100.0

    def test_optional_costs_default_to_one(self):
        case = case_from_document(_minimal_doc())
        assert case.branches[0].defense_cost == 1.0
        assert case.generators[0].attack_cost == 1.0

    def test_json_syntax_error_has_location(self):
        text = '{\n  "format": 1,\n  "buses": [\n    {"id": 1},,\n  ]\n}\n'
        with pytest.raises(CaseParseError) as info:
            parse_case(text, source="broken.json")
        assert info.value.line == 4
        assert info.value.column is not None
        assert info.value.source == "broken.json"

    def test_missing_required_key_names_field(self):
        doc = _minimal_doc()
        del doc["branches"][0]["reactance_x"]
        with pytest.raises(CaseParseError) as info:
            case_from_document(doc)
        assert info.value.field == "branches[0].reactance_x"

    def test_unknown_key(self):
        doc = _minimal_doc()
        doc["generators"][0]["ramp"] = 3
        with pytest.raises(CaseParseError, match=r"generators\[0\].ramp: unknown key"):
            case_from_document(doc)

    def test_boolean_is_not_a_number(self):
        doc = _minimal_doc()
        doc["generators"][0]["p_max"] = True
        with pytest.raises(CaseParseError, match="boolean"):
            case_from_document(doc)

    def test_wrong_format_version(self):
        doc = _minimal_doc()
        doc["format"] = 99
        with pytest.raises(CaseParseError, match="format"):
            case_from_document(doc)

    @pytest.mark.parametrize("version", [True, 1.0, "1"])
    def test_format_must_be_the_integer_one(self, version):
        doc = _minimal_doc()
        doc["format"] = version
        with pytest.raises(CaseParseError, match="format"):
            case_from_document(doc)

    def test_collects_several_problems(self):
        doc = _minimal_doc()
        doc["buses"][0]["id"] = "one"
        doc["loads"][0]["expected_mw"] = "lots"
        with pytest.raises(CaseParseError) as info:
            case_from_document(doc)
        assert "buses[0].id" in str(info.value)
        assert "loads[0].expected_mw" in str(info.value)
        assert info.value.field == "buses[0].id"

    def test_semantic_errors_come_from_case(self):
        doc = _minimal_doc()
        doc["loads"][0]["bus"] = 42
        with pytest.raises(CaseValidationError, match="unknown bus 42"):
            case_from_document(doc)

    def test_not_an_object(self):
        with pytest.raises(CaseParseError):
            parse_case("[1, 2, 3]")


# ============================================================================
# Files and serializer
# ============================================================================


class TestFiles:

    def test_missing_file(self, tmp_path):
        with pytest.raises(CaseParseError, match="cannot read"):
            load_case(str(tmp_path / "nope.json"))

    def test_write_then_load(self, tmp_path, three_bus_case):
        path = str(tmp_path / "case.json")
        write_case(three_bus_case, path, name="three")
        assert load_case(path) == three_bus_case

    @pytest.mark.parametrize("factory", [make_single_bus_case, make_three_bus_case,
                                         make_modified_rts79])
    def test_serializer_is_canonical(self, factory):
        case = factory()
        text = serialize_case(case)
        assert parse_case(text) == case
        assert serialize_case(parse_case(text)) == text

    def test_document_order(self, three_bus_case):
        doc = case_to_document(three_bus_case, name="x")
        assert list(doc)[:3] == ["format", "name", "base_mva"]
        assert list(doc["branches"][0]) == ["id", "from_bus", "to_bus", "reactance_x",
                                            "flow_limit", "defense_cost", "attack_cost"]
        assert "name" not in doc["buses"][0]

    def test_shipped_three_bus_case(self, three_bus_case):
        assert load_case(os.path.join(CASES_DIR, "three_bus.json")).branches == \
            three_bus_case.branches

    def test_shipped_rts79_matches_builder(self):
        assert load_case(os.path.join(CASES_DIR, "modified_rts79.json")) == make_modified_rts79()

    def test_shipped_documents_are_json(self):
        for name in ("three_bus.json", "modified_rts79.json"):
            with open(os.path.join(CASES_DIR, name), encoding="utf-8") as f:
                assert simplejson.load(f)["format"] == FORMAT_VERSION

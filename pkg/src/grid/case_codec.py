# -*- coding: utf-8 -*-
"""
Case document reader/writer.

A case document is a JSON object with ``"format": 1`` and one array per
component kind plus a ``budgets`` object.  Unknown keys are rejected so
that typos ("flow_limt") fail loudly instead of silently defaulting.
Structural problems (bad JSON, unknown or missing keys, wrong types)
raise ``CaseParseError``; semantic problems are collected by
``GridCase`` construction and raised together as ``CaseValidationError``.
"""
from __future__ import annotations

import os
from collections import OrderedDict

import simplejson

from src.core.exceptions import CaseParseError
from src.grid.case import Branch, Budgets, Bus, Generator, GridCase, LoadPoint, WindFarm

FORMAT_VERSION = 1

# Largest document we will parse in one shot.
MAX_CASE_SIZE = 20 * 1024 * 1024

_INT, _NUM, _STR = "integer", "number", "string"

# key -> (type, required); order is the serialization order
_COMPONENT_FIELDS = OrderedDict([
    ("buses", (Bus, OrderedDict([("id", (_INT, True)), ("name", (_STR, False))]))),
    ("branches", (Branch, OrderedDict([
        ("id", (_INT, True)), ("from_bus", (_INT, True)), ("to_bus", (_INT, True)),
        ("reactance_x", (_NUM, True)), ("flow_limit", (_NUM, True)),
        ("defense_cost", (_NUM, False)), ("attack_cost", (_NUM, False)),
    ]))),
    ("generators", (Generator, OrderedDict([
        ("id", (_INT, True)), ("bus", (_INT, True)), ("p_max", (_NUM, True)),
        ("defense_cost", (_NUM, False)), ("attack_cost", (_NUM, False)),
    ]))),
    ("wind_farms", (WindFarm, OrderedDict([
        ("id", (_INT, True)), ("bus", (_INT, True)), ("expected_mw", (_NUM, True)),
        ("dev_up_mw", (_NUM, False)), ("dev_down_mw", (_NUM, False)),
    ]))),
    ("loads", (LoadPoint, OrderedDict([
        ("id", (_INT, True)), ("bus", (_INT, True)), ("expected_mw", (_NUM, True)),
        ("dev_up_mw", (_NUM, False)), ("dev_down_mw", (_NUM, False)),
    ]))),
])

_BUDGET_FIELDS = ("defense_budget", "attack_budget",
                  "load_uncertainty_budget", "wind_uncertainty_budget")

_TOP_LEVEL = ("format", "name", "base_mva") + tuple(_COMPONENT_FIELDS) + ("budgets",)


# ---------------------------------------------------------------------------
# Field checking
# ---------------------------------------------------------------------------

class _Problems(object):
    """Collects structural problems with their field paths."""

    def __init__(self):
        self.items = []

    def add(self, path, message):
        self.items.append((path, message))

    def raise_if_any(self, source):
        if not self.items:
            return
        first_path = self.items[0][0]
        text = "; ".join("%s: %s" % (path, msg) for path, msg in self.items)
        raise CaseParseError("malformed case document: %s" % text,
                             source=source, field=first_path)


def _coerce(value, kind, path, problems):
    # bool is an int subclass; never accept it as a number
    if isinstance(value, bool):
        problems.add(path, "expected %s, got boolean" % kind)
        return None
    if kind == _INT:
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        problems.add(path, "expected integer, got %r" % (value,))
        return None
    if kind == _NUM:
        if isinstance(value, (int, float)):
            return float(value)
        problems.add(path, "expected number, got %r" % (value,))
        return None
    if not isinstance(value, str):
        problems.add(path, "expected string, got %r" % (value,))
        return None
    return value


def _read_object(raw, fields, path, problems):
    if not isinstance(raw, dict):
        problems.add(path, "expected an object")
        return None
    for key in raw:
        if key not in fields:
            problems.add("%s.%s" % (path, key), "unknown key")
    values = {}
    for key, (kind, required) in fields.items():
        if key not in raw:
            if required:
                problems.add("%s.%s" % (path, key), "missing required key")
            continue
        if raw[key] is None and not required:
            continue
        values[key] = _coerce(raw[key], kind, "%s.%s" % (path, key), problems)
    return values


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def case_from_document(doc, source=None):
    """Build a validated ``GridCase`` from an already-decoded document."""
    problems = _Problems()
    if not isinstance(doc, dict):
        raise CaseParseError("case document must be a JSON object", source=source)

    for key in doc:
        if key not in _TOP_LEVEL:
            problems.add(key, "unknown key")
    version = doc.get("format")
    if type(version) is not int or version != FORMAT_VERSION:
        problems.add("format", "expected format %d, got %r" % (FORMAT_VERSION, version))

    components = {}
    for key, (cls, fields) in _COMPONENT_FIELDS.items():
        raw_items = doc.get(key, [])
        if key == "buses" and key not in doc:
            problems.add(key, "missing required key")
        if not isinstance(raw_items, list):
            problems.add(key, "expected an array")
            continue
        built = []
        for pos, raw in enumerate(raw_items):
            values = _read_object(raw, fields, "%s[%d]" % (key, pos), problems)
            if values is not None and None not in values.values():
                built.append(cls(**values))
        components[key] = tuple(built)

    budgets_raw = doc.get("budgets", {})
    budget_values = _read_object(budgets_raw, OrderedDict((k, (_NUM, False)) for k in _BUDGET_FIELDS),
                                 "budgets", problems) or {}

    base_mva = doc.get("base_mva", 100.0)
    base_mva = _coerce(base_mva, _NUM, "base_mva", problems)

    problems.raise_if_any(source)
    return GridCase(budgets=Budgets(**budget_values), base_mva=base_mva, **components)


def parse_case(text, source=None):
    """Parse case document *text*.  JSON syntax errors carry line and
    column."""
    try:
        doc = simplejson.loads(text)
    except simplejson.JSONDecodeError as e:
        raise CaseParseError("invalid JSON: %s" % e.msg, source=source,
                             line=e.lineno, column=e.colno)
    return case_from_document(doc, source=source)


def load_case(path):
    """Read and validate the case document at *path*."""
    try:
        size = os.path.getsize(path)
    except OSError as e:
        raise CaseParseError("cannot read case document: %s" % e.strerror, source=path)
    if size > MAX_CASE_SIZE:
        raise CaseParseError("case document too large: %d bytes (max %d)" % (
            size, MAX_CASE_SIZE), source=path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_case(text, source=path)


def case_to_document(case, name=None):
    """Inverse of ``case_from_document``: an ordered, JSON-ready dict."""
    doc = OrderedDict([("format", FORMAT_VERSION)])
    if name:
        doc["name"] = name
    doc["base_mva"] = case.base_mva
    for key, (_, fields) in _COMPONENT_FIELDS.items():
        items = []
        for component in getattr(case, key):
            entry = OrderedDict()
            for field_name in fields:
                value = getattr(component, field_name)
                if value is not None:
                    entry[field_name] = value
            items.append(entry)
        doc[key] = items
    doc["budgets"] = OrderedDict((k, getattr(case.budgets, k)) for k in _BUDGET_FIELDS)
    return doc


def serialize_case(case, name=None):
    """Canonical text of *case*; ``parse_case(serialize_case(c)) == c``."""
    return simplejson.dumps(case_to_document(case, name=name), indent=2) + "\n"


def write_case(case, path, name=None):
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_case(case, name=name))

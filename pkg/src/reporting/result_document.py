# -*- coding: utf-8 -*-
"""
Machine-readable run results.

``result.json`` carries the final defense, the worst attack and
realization, the load loss, the convergence history and timing, plus a
fingerprint of the exact case the run used.  Documents are checked
against ``schemas/result.schema.json`` before they are written.
"""
from __future__ import annotations

import hashlib
import logging
import os
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, Optional

import jsonschema
import simplejson

from src import __version__
from src.grid.case_codec import serialize_case
from src.grid.uncertainty import UP

log = logging.getLogger(__name__)

RESULT_SCHEMA_VERSION = 1

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")
RESULT_SCHEMA_FILE = os.path.join(SCHEMA_DIR, "result.schema.json")


def case_fingerprint(case):
    """sha256 over the canonical case text."""
    return hashlib.sha256(serialize_case(case).encode("utf-8")).hexdigest()


def realization_rows(case, realization):
    """Every load and wind factor that moved off nominal, with its
    direction and MW delta, in case order."""
    loads, farms = realization.to_sparse(case)
    rows = []
    for entry in loads:
        load = next(l for l in case.loads if l.id == entry["load_id"])
        delta = load.dev_up_mw if entry["direction"] == UP else -load.dev_down_mw
        rows.append(OrderedDict([("kind", "load"), ("id", load.id),
                                 ("direction", entry["direction"]),
                                 ("nominal_mw", load.expected_mw), ("delta_mw", delta)]))
    for entry in farms:
        farm = next(w for w in case.wind_farms if w.id == entry["farm_id"])
        delta = farm.dev_up_mw if entry["direction"] == UP else -farm.dev_down_mw
        rows.append(OrderedDict([("kind", "wind"), ("id", farm.id),
                                 ("direction", entry["direction"]),
                                 ("nominal_mw", farm.expected_mw), ("delta_mw", delta)]))
    return rows


@dataclass
class ResultDocument:
    case_fingerprint: str
    case_name: Optional[str]
    budgets: dict
    status: str
    load_loss_mw: float
    defended_branches: List[int]
    defended_generators: List[int]
    attacked_branches: List[int]
    attacked_generators: List[int]
    worst_realization: List[dict]
    convergence: List[dict]
    total_time_s: float
    tool_version: str = __version__
    schema_version: int = RESULT_SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_report(cls, report, case, case_name=None):
        budgets = case.budgets
        convergence = [OrderedDict([("iter", r.index), ("lower_bound_mw", r.lower_bound),
                                    ("upper_bound_mw", r.upper_bound),
                                    ("subproblem_mw", r.subproblem_value),
                                    ("scenario_signature", r.scenario_signature),
                                    ("master_time_s", r.master_time_s),
                                    ("subproblem_time_s", r.subproblem_time_s)])
                       for r in report.iterations]
        return cls(
            case_fingerprint=case_fingerprint(case),
            case_name=case_name,
            budgets=OrderedDict([("defense_budget", budgets.defense_budget),
                                 ("attack_budget", budgets.attack_budget),
                                 ("load_uncertainty_budget", budgets.load_uncertainty_budget),
                                 ("wind_uncertainty_budget", budgets.wind_uncertainty_budget)]),
            status=report.status,
            load_loss_mw=report.final_loss,
            defended_branches=report.final_defense.defended_branch_ids(case),
            defended_generators=report.final_defense.defended_gen_ids(case),
            attacked_branches=report.worst_attack.attacked_branch_ids(case),
            attacked_generators=report.worst_attack.attacked_gen_ids(case),
            worst_realization=realization_rows(case, report.worst_realization),
            convergence=convergence,
            total_time_s=report.total_time_s,
        )

    def to_dict(self):
        doc = OrderedDict([
            ("schema_version", self.schema_version),
            ("tool_version", self.tool_version),
            ("case", OrderedDict([("name", self.case_name),
                                  ("fingerprint", self.case_fingerprint)])),
            ("budgets", self.budgets),
            ("status", self.status),
            ("load_loss_mw", self.load_loss_mw),
            ("defense", OrderedDict([("branches", self.defended_branches),
                                     ("generators", self.defended_generators)])),
            ("attack", OrderedDict([("branches", self.attacked_branches),
                                    ("generators", self.attacked_generators)])),
            ("worst_realization", self.worst_realization),
            ("convergence", self.convergence),
            ("timing", OrderedDict([("total_s", self.total_time_s)])),
        ])
        doc.update(self.extra)
        return doc


_schema_cache = {}


def load_schema(path=RESULT_SCHEMA_FILE):
    if path not in _schema_cache:
        with open(path, "r", encoding="utf-8") as f:
            _schema_cache[path] = simplejson.load(f)
    return _schema_cache[path]


def validate_result(doc, schema=None):
    """Raise ``jsonschema.ValidationError`` unless *doc* conforms."""
    jsonschema.validate(instance=doc, schema=schema or load_schema())


def dumps_result(document):
    doc = document.to_dict() if isinstance(document, ResultDocument) else document
    validate_result(doc)
    return simplejson.dumps(doc, indent=2) + "\n"


def write_result(document, path):
    text = dumps_result(document)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    log.info("Wrote %s", path)
    return path

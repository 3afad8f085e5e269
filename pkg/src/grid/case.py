# -*- coding: utf-8 -*-
"""
Static problem instance of the grid defense planner.

A ``GridCase`` bundles buses, branches, conventional generators, wind
farms, load points and the four budgets (defense, attack, load
uncertainty, wind uncertainty).  Cases are immutable: every override
(budgets, deviation magnitudes) produces a new, re-validated case, so a
case can be shared read-only between concurrent solves.

Documents are written in MW and per-unit reactance; ``base_mva``
converts to the per-unit values every optimization model is built on.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.core.exceptions import CaseValidationError
from src.core.itertools_helpers import group_by_key

DEFAULT_BASE_MVA = 100.0


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bus:
    id: int
    name: Optional[str] = None


@dataclass(frozen=True)
class Branch:
    id: int
    from_bus: int
    to_bus: int
    reactance_x: float
    flow_limit: float
    defense_cost: float = 1.0
    attack_cost: float = 1.0

    def violations(self):
        found = []
        label = "branch %s" % self.id
        if not self.reactance_x > 0:
            found.append("%s: reactance_x must be > 0 (got %r)" % (label, self.reactance_x))
        if not self.flow_limit >= 0:
            found.append("%s: flow_limit must be >= 0 (got %r)" % (label, self.flow_limit))
        if not self.defense_cost > 0:
            found.append("%s: defense_cost must be > 0 (got %r)" % (label, self.defense_cost))
        if not self.attack_cost > 0:
            found.append("%s: attack_cost must be > 0 (got %r)" % (label, self.attack_cost))
        if self.from_bus == self.to_bus:
            found.append("%s: from_bus and to_bus are both %s" % (label, self.from_bus))
        return found


@dataclass(frozen=True)
class Generator:
    id: int
    bus: int
    p_max: float
    defense_cost: float = 1.0
    attack_cost: float = 1.0

    def violations(self):
        found = []
        label = "generator %s" % self.id
        if not self.p_max >= 0:
            found.append("%s: p_max must be >= 0 (got %r)" % (label, self.p_max))
        if not self.defense_cost > 0:
            found.append("%s: defense_cost must be > 0 (got %r)" % (label, self.defense_cost))
        if not self.attack_cost > 0:
            found.append("%s: attack_cost must be > 0 (got %r)" % (label, self.attack_cost))
        return found


def _deviation_violations(label, expected, dev_up, dev_down):
    found = []
    if not expected >= 0:
        found.append("%s: expected_mw must be >= 0 (got %r)" % (label, expected))
    if not dev_up >= 0:
        found.append("%s: dev_up_mw must be >= 0 (got %r)" % (label, dev_up))
    if not 0 <= dev_down <= expected:
        found.append("%s: dev_down_mw must lie in [0, expected_mw=%r] (got %r)" % (
            label, expected, dev_down))
    return found


@dataclass(frozen=True)
class WindFarm:
    id: int
    bus: int
    expected_mw: float
    dev_up_mw: float = 0.0
    dev_down_mw: float = 0.0

    def violations(self):
        return _deviation_violations(
            "wind farm %s" % self.id, self.expected_mw, self.dev_up_mw, self.dev_down_mw)


@dataclass(frozen=True)
class LoadPoint:
    id: int
    bus: int
    expected_mw: float
    dev_up_mw: float = 0.0
    dev_down_mw: float = 0.0

    def violations(self):
        return _deviation_violations(
            "load %s" % self.id, self.expected_mw, self.dev_up_mw, self.dev_down_mw)


@dataclass(frozen=True)
class Budgets:
    defense_budget: float = 0.0
    attack_budget: float = 0.0
    load_uncertainty_budget: float = 0.0
    wind_uncertainty_budget: float = 0.0

    def violations(self):
        return ["budgets: %s must be >= 0 (got %r)" % (f.name, getattr(self, f.name))
                for f in dataclasses.fields(self)
                if not getattr(self, f.name) >= 0]


# ---------------------------------------------------------------------------
# GridCase
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridCase:
    """The whole static instance.  Construction validates every
    invariant and reports all violations at once."""

    buses: Tuple[Bus, ...]
    branches: Tuple[Branch, ...] = ()
    generators: Tuple[Generator, ...] = ()
    wind_farms: Tuple[WindFarm, ...] = ()
    loads: Tuple[LoadPoint, ...] = ()
    budgets: Budgets = field(default_factory=Budgets)
    base_mva: float = DEFAULT_BASE_MVA

    def __post_init__(self):
        for name in ("buses", "branches", "generators", "wind_farms", "loads"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        found = case_violations(self)
        if found:
            raise CaseValidationError(found)

    # ---------------------------------------------------------------
    # Positions and lookups
    # ---------------------------------------------------------------

    @functools.cached_property
    def bus_position(self):
        return {bus.id: pos for pos, bus in enumerate(self.buses)}

    @functools.cached_property
    def reference_bus(self):
        """Lowest-numbered bus; its angle is pinned in dispatch."""
        return min(bus.id for bus in self.buses)

    @functools.cached_property
    def generators_at(self):
        return group_by_key(range(len(self.generators)), lambda j: self.generators[j].bus)

    @functools.cached_property
    def wind_at(self):
        return group_by_key(range(len(self.wind_farms)), lambda k: self.wind_farms[k].bus)

    @functools.cached_property
    def loads_at(self):
        return group_by_key(range(len(self.loads)), lambda i: self.loads[i].bus)

    @functools.cached_property
    def branches_at(self):
        incident = {}
        for pos, branch in enumerate(self.branches):
            incident.setdefault(branch.from_bus, []).append(pos)
            incident.setdefault(branch.to_bus, []).append(pos)
        return incident

    def branch_by_id(self, branch_id):
        for branch in self.branches:
            if branch.id == branch_id:
                return branch
        raise KeyError("no branch with id %r" % branch_id)

    def generator_by_id(self, gen_id):
        for gen in self.generators:
            if gen.id == gen_id:
                return gen
        raise KeyError("no generator with id %r" % gen_id)

    # ---------------------------------------------------------------
    # Aggregates
    # ---------------------------------------------------------------

    def total_expected_load(self):
        return sum(load.expected_mw for load in self.loads)

    def total_capacity(self):
        return sum(gen.p_max for gen in self.generators)

    def element_count(self):
        """Number of defendable/attackable elements (branches + generators)."""
        return len(self.branches) + len(self.generators)

    def to_pu(self, mw):
        return mw / self.base_mva

    def to_mw(self, pu):
        return pu * self.base_mva

    # ---------------------------------------------------------------
    # Overrides -- each returns a new validated case
    # ---------------------------------------------------------------

    def with_budgets(self, **changes):
        return dataclasses.replace(self, budgets=dataclasses.replace(self.budgets, **changes))

    def with_load_deviation(self, dev_mw):
        """Same up/down deviation *dev_mw* on every load point."""
        loads = tuple(dataclasses.replace(load, dev_up_mw=float(dev_mw), dev_down_mw=float(dev_mw))
                      for load in self.loads)
        return dataclasses.replace(self, loads=loads)

    def with_wind_deviation(self, fraction):
        """Up/down wind deviations as *fraction* of each farm's expected output."""
        farms = tuple(dataclasses.replace(farm,
                                          dev_up_mw=float(fraction) * farm.expected_mw,
                                          dev_down_mw=float(fraction) * farm.expected_mw)
                      for farm in self.wind_farms)
        return dataclasses.replace(self, wind_farms=farms)


def _duplicates(ids):
    seen, dupes = set(), []
    for item in ids:
        if item in seen and item not in dupes:
            dupes.append(item)
        seen.add(item)
    return dupes


def case_violations(case):
    """Every violated GridCase invariant, in a stable order."""
    found = []
    if not case.buses:
        found.append("case: at least one bus is required")
    if not (isinstance(case.base_mva, (int, float)) and case.base_mva > 0
            and math.isfinite(case.base_mva)):
        found.append("case: base_mva must be a positive number (got %r)" % (case.base_mva,))

    bus_ids = [bus.id for bus in case.buses]
    for kind, items in (("bus", case.buses), ("branch", case.branches),
                        ("generator", case.generators), ("wind farm", case.wind_farms),
                        ("load", case.loads)):
        for dupe in _duplicates([item.id for item in items]):
            found.append("%s id %r is not unique" % (kind, dupe))

    known = set(bus_ids)
    for branch in case.branches:
        found.extend(branch.violations())
        for end in (branch.from_bus, branch.to_bus):
            if end not in known:
                found.append("branch %s references unknown bus %s" % (branch.id, end))
    for kind, items in (("generator", case.generators), ("wind farm", case.wind_farms),
                        ("load", case.loads)):
        for item in items:
            found.extend(item.violations())
            if item.bus not in known:
                found.append("%s %s references unknown bus %s" % (kind, item.id, item.bus))
    found.extend(case.budgets.violations())
    return found


# ---------------------------------------------------------------------------
# Network structure
# ---------------------------------------------------------------------------

def incidence(case):
    """Bus-branch incidence matrix, rows in bus order, columns in branch
    order: +1 where the branch leaves the bus, -1 where it enters."""
    matrix = np.zeros((len(case.buses), len(case.branches)), dtype=np.int8)
    for col, branch in enumerate(case.branches):
        matrix[case.bus_position[branch.from_bus], col] = 1
        matrix[case.bus_position[branch.to_bus], col] = -1
    return matrix


def susceptances_pu(case):
    """1 / x_l per branch (x_l already per-unit)."""
    return np.array([1.0 / branch.reactance_x for branch in case.branches])


def angle_span(case):
    """Sum of ``x_l * F_l`` (radians): no flow-feasible dispatch needs a
    bus angle further than this from its island's anchor bus."""
    return float(sum(branch.reactance_x * case.to_pu(branch.flow_limit)
                     for branch in case.branches))

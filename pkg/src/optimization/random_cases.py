# -*- coding: utf-8 -*-
"""
Seeded random small instances for oracle cross-checks.

Every instance is connected (a random spanning tree plus extra
branches between distinct bus pairs), uses unit defense/attack costs
and keeps every budget at 2 or below so exhaustive enumeration stays
cheap.
"""
from __future__ import annotations

import logging

import numpy as np

from src.grid.case import Branch, Budgets, Bus, Generator, GridCase, LoadPoint, WindFarm

log = logging.getLogger(__name__)

MAX_BUDGET = 2


def _round(value):
    return float(round(float(value), 1))


def random_case(rng):
    """One random instance drawn from *rng* (``numpy.random.Generator``)."""
    n_bus = int(rng.integers(3, 7))
    max_pairs = n_bus * (n_bus - 1) // 2
    n_branch = int(rng.integers(max(3, n_bus - 1), min(8, max_pairs) + 1))

    order = [int(b) + 1 for b in rng.permutation(n_bus)]
    pairs = []
    for k in range(1, n_bus):
        parent = order[int(rng.integers(k))]
        pairs.append(tuple(sorted((parent, order[k]))))
    spare = [(a, b) for a in range(1, n_bus + 1) for b in range(a + 1, n_bus + 1)
             if (a, b) not in pairs]
    for pick in rng.permutation(len(spare))[:n_branch - len(pairs)]:
        pairs.append(spare[int(pick)])

    branches = tuple(
        Branch(id=i, from_bus=a, to_bus=b,
               reactance_x=_round(rng.uniform(0.05, 0.3) * 100) / 100,
               flow_limit=_round(rng.uniform(30.0, 150.0)))
        for i, (a, b) in enumerate(pairs, start=1))

    def bus():
        return int(rng.integers(1, n_bus + 1))

    loads = []
    for i in range(1, int(rng.integers(1, 4)) + 1):
        expected = _round(rng.uniform(20.0, 120.0))
        loads.append(LoadPoint(id=i, bus=bus(), expected_mw=expected,
                               dev_up_mw=_round(rng.uniform(0.0, 0.3) * expected),
                               dev_down_mw=_round(rng.uniform(0.0, 0.3) * expected)))
    farms = []
    for k in range(1, int(rng.integers(0, 3)) + 1):
        expected = _round(rng.uniform(10.0, 60.0))
        farms.append(WindFarm(id=k, bus=bus(), expected_mw=expected,
                              dev_up_mw=_round(0.2 * expected), dev_down_mw=_round(0.2 * expected)))

    demand = sum(load.expected_mw for load in loads)
    n_gen = int(rng.integers(1, 4))
    generators = tuple(
        Generator(id=j, bus=bus(), p_max=_round(rng.uniform(0.5, 1.5) * demand / n_gen))
        for j in range(1, n_gen + 1))

    budgets = Budgets(
        defense_budget=float(rng.integers(0, MAX_BUDGET + 1)),
        attack_budget=float(rng.integers(0, MAX_BUDGET + 1)),
        load_uncertainty_budget=float(rng.integers(0, min(MAX_BUDGET, len(loads)) + 1)),
        wind_uncertainty_budget=float(rng.integers(0, min(MAX_BUDGET, len(farms)) + 1)))

    case = GridCase(buses=tuple(Bus(id=b) for b in range(1, n_bus + 1)), branches=branches,
                    generators=generators, wind_farms=tuple(farms), loads=tuple(loads),
                    budgets=budgets)
    log.debug("Random case: %d buses, %d branches, %d gens, %d farms, %d loads", n_bus,
              len(branches), len(generators), len(farms), len(loads))
    return case


def random_cases(count, seed):
    """*count* instances from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [random_case(rng) for _ in range(count)]

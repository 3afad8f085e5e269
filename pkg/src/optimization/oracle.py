# -*- coding: utf-8 -*-
"""
Exhaustive min-max-min evaluation for small instances.

The oracle walks every budget-feasible defense, every budget-feasible
attack and every extreme realization, and solves one dispatch LP per
leaf.  It shares no code with the dual/big-M machinery, so agreement
with C&CG is an end-to-end check of both.

Leaves are cached by the set of destroyed elements and the realization:
an attack that lands on a defended element is the same leaf as the
attack without that hit.  A defense whose running worst case already
exceeds the best complete defense is abandoned; its table entry is then
a lower bound and it is listed in ``pruned``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple

import numpy as np

from src.core.exceptions import OracleError, OracleSizeError
from src.core.itertools_helpers import budget_subsets, count_budget_subsets
from src.grid.uncertainty import (DEFAULT_REALIZATION_CAP, UncertaintyRealization,
                                  count_extreme_realizations, enumerate_extreme_realizations)
from src.optimization.dispatch import solve_dispatch
from src.optimization.plans import AttackPlan, DefensePlan
from src.solver.backend import get_backend

log = logging.getLogger(__name__)

DEFAULT_MAX_DEFENSES = 10 ** 5
DEFAULT_MAX_LEAVES = 10 ** 5
DEFAULT_WALL_CLOCK_S = 600.0

PRUNE_TOL_MW = 1e-6


@dataclass(frozen=True)
class OracleCaps:
    max_defenses: int = DEFAULT_MAX_DEFENSES
    max_leaves: int = DEFAULT_MAX_LEAVES
    wall_clock_s: float = DEFAULT_WALL_CLOCK_S
    max_realizations: int = DEFAULT_REALIZATION_CAP

    @classmethod
    def from_config(cls, config):
        return cls(max_defenses=config.get_int("oracle", "max_defenses", DEFAULT_MAX_DEFENSES),
                   max_leaves=config.get_int("oracle", "max_leaves", DEFAULT_MAX_LEAVES),
                   wall_clock_s=config.get_float("oracle", "wall_clock_s", DEFAULT_WALL_CLOCK_S),
                   max_realizations=config.get_int("uncertainty", "max_realizations",
                                                   DEFAULT_REALIZATION_CAP))


@dataclass(frozen=True)
class OracleResult:
    """Signatures in ``pruned`` were abandoned once their running worst
    case passed the incumbent; their table entries are lower bounds, not
    exact worst cases."""
    best_defense: DefensePlan
    worst_case_loss: float
    per_defense_table: Dict[str, float]
    instance_size: Dict[str, int]
    worst_attack: AttackPlan
    worst_realization: UncertaintyRealization
    pruned: FrozenSet[str] = frozenset()


def _defense_costs(case):
    return [br.defense_cost for br in case.branches] + [g.defense_cost for g in case.generators]


def _attack_costs(case):
    return [br.attack_cost for br in case.branches] + [g.attack_cost for g in case.generators]


def enumerate_defenses(case, cap=DEFAULT_MAX_DEFENSES):
    """Every budget-feasible defense: smallest first, then lexicographic
    over (branches, generators)."""
    costs = _defense_costs(case)
    count = count_budget_subsets(costs, case.budgets.defense_budget, cap)
    if cap is not None and count > cap:
        raise OracleSizeError({"defenses": count}, {"defenses": cap})
    for positions in budget_subsets(costs, case.budgets.defense_budget):
        yield DefensePlan.from_positions(case, positions)


def enumerate_attacks(case, cap=DEFAULT_MAX_LEAVES):
    """Every budget-feasible attack, in the same order as defenses."""
    costs = _attack_costs(case)
    count = count_budget_subsets(costs, case.budgets.attack_budget, cap)
    if cap is not None and count > cap:
        raise OracleSizeError({"attacks": count}, {"attacks": cap})
    for positions in budget_subsets(costs, case.budgets.attack_budget):
        yield AttackPlan.from_positions(case, positions)


def instance_size(case, cap=None):
    n_def = count_budget_subsets(_defense_costs(case), case.budgets.defense_budget, cap)
    n_att = count_budget_subsets(_attack_costs(case), case.budgets.attack_budget, cap)
    n_real = count_extreme_realizations(case)
    return {"defenses": n_def, "attacks": n_att, "realizations": n_real,
            "leaves": n_att * n_real}


def oracle_solve(case, caps=None, backend=None, prune=True):
    """Exact trilevel optimum by enumeration.  With ``prune=False`` every
    defense is evaluated in full and every table entry is exact."""
    caps = caps or OracleCaps()
    backend = backend or get_backend()
    size = instance_size(case, cap=max(caps.max_defenses, caps.max_leaves))
    limits = {"defenses": caps.max_defenses, "leaves": caps.max_leaves,
              "realizations": caps.max_realizations}
    over = {k: size[k] for k in limits if size[k] > limits[k]}
    if over:
        raise OracleSizeError(over, limits)
    log.info("Oracle: %d defenses x %d attacks x %d realizations", size["defenses"],
             size["attacks"], size["realizations"])

    started = time.perf_counter()
    realizations = list(enumerate_extreme_realizations(case, cap=caps.max_realizations))
    attacks = list(enumerate_attacks(case, cap=None))
    leaf_cache = {}

    def leaf(effective, realization):
        key = (effective.signature(), realization.signature())
        if key not in leaf_cache:
            if time.perf_counter() - started > caps.wall_clock_s:
                raise OracleError("oracle wall-clock guard of %.0f s exceeded" % caps.wall_clock_s)
            leaf_cache[key] = solve_dispatch(case, DefensePlan.empty(case), effective,
                                             realization, backend).total_shed
        return leaf_cache[key]

    table = {}
    pruned = set()
    best = None
    best_loss = math.inf
    for defense in enumerate_defenses(case, cap=None):
        worst, worst_pair, abandoned = -math.inf, None, False
        for attack in attacks:
            effective = attack.effective(defense)
            for realization in realizations:
                shed = leaf(effective, realization)
                if shed > worst:
                    worst, worst_pair = shed, (attack, realization)
                    if prune and worst > best_loss + PRUNE_TOL_MW:
                        abandoned = True
                        break
            if abandoned:
                break
        table[defense.signature()] = worst
        if abandoned:
            pruned.add(defense.signature())
            continue
        if worst < best_loss:
            best_loss, best = worst, (defense, worst_pair)

    defense, (attack, realization) = best
    log.info("Oracle: loss %.4f MW after %d dispatch solves (%.1f s)", best_loss,
             len(leaf_cache), time.perf_counter() - started)
    size["dispatch_solves"] = len(leaf_cache)
    return OracleResult(best_defense=defense, worst_case_loss=best_loss,
                        per_defense_table=table, instance_size=size,
                        worst_attack=attack, worst_realization=realization,
                        pruned=frozenset(pruned))


# ---------------------------------------------------------------------------
# Extreme-point check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremePointReport:
    samples: int
    counterexamples: Tuple[dict, ...]
    max_excess_mw: float

    @property
    def ok(self):
        return not self.counterexamples


def _random_interior(case, rng):
    """Fractional realization inside the budget sets."""
    def family(n, budget):
        up, down = np.zeros(n), np.zeros(n)
        if n == 0 or budget <= 0:
            return up, down
        raw = rng.random((n, 2))
        raw /= np.maximum(1.0, raw.sum(axis=1, keepdims=True))
        total = raw.sum()
        if total > budget:
            raw *= budget / total
        return raw[:, 0], raw[:, 1]

    lu, ld = family(len(case.loads), case.budgets.load_uncertainty_budget)
    wu, wd = family(len(case.wind_farms), case.budgets.wind_uncertainty_budget)
    return UncertaintyRealization(tuple(lu), tuple(ld), tuple(wu), tuple(wd))


def validate_extreme_points(case, defense, samples=200, seed=0, backend=None, tol_mw=1e-6,
                            cap=DEFAULT_REALIZATION_CAP):
    """Sample interior realizations and compare each to the best vertex
    for the same attack."""
    backend = backend or get_backend()
    rng = np.random.default_rng(seed)
    attacks = list(enumerate_attacks(case))
    vertices = list(enumerate_extreme_realizations(case, cap=cap))
    vertex_max = {}
    found = []
    max_excess = -math.inf
    for _ in range(samples):
        attack = attacks[int(rng.integers(len(attacks)))]
        realization = _random_interior(case, rng)
        key = attack.signature()
        if key not in vertex_max:
            vertex_max[key] = max(solve_dispatch(case, defense, attack, z, backend).total_shed
                                  for z in vertices)
        shed = solve_dispatch(case, defense, attack, realization, backend).total_shed
        excess = shed - vertex_max[key]
        max_excess = max(max_excess, excess)
        if excess > tol_mw:
            found.append({"attack": attack.signature(), "realization": realization,
                          "shed_mw": shed, "vertex_max_mw": vertex_max[key]})
    if found:
        log.warning("Extreme-point check: %d counterexample(s)", len(found))
    return ExtremePointReport(samples=samples, counterexamples=tuple(found),
                              max_excess_mw=max_excess if samples else 0.0)

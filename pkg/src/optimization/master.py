# -*- coding: utf-8 -*-
"""
Defender master problem.

The master picks one defense (binaries shared by all scenarios) that
minimizes the worst shed over the scenarios collected so far.  Each
scenario carries a fixed attack and realization and gets its own full
dispatch block.  Only elements the scenario attacks need a product
with the defense binary:

* an attacked branch keeps its flow definition through an on/off big-M
  pair and its flow is forced to zero when undefended;
* an attacked generator is capped at ``p_max * w``.

The reference bus angle is pinned at zero in every block and the other
angles are boxed to ``[-D, D]`` with ``D = max(angle_bound_rad,
angle_span(case))``.  Any flow-feasible dispatch can be re-anchored so
every island has one bus at zero, which keeps every angle inside that
box; the branch big-M is then ``2 * D / x + flow_limit``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

from src.core.exceptions import DuplicateScenarioError, EmptyScenarioSetError, PostCheckError
from src.grid.case import angle_span, susceptances_pu
from src.grid.uncertainty import UncertaintyRealization
from src.optimization.dispatch import solve_dispatch
from src.optimization.plans import AttackPlan, DefensePlan
from src.optimization.subproblem import BigMConfig
from src.solver.backend import get_backend
from src.solver.model import BINARY, EQ, GE, LE, MINIMIZE, ModelBuilder

log = logging.getLogger(__name__)

POST_CHECK_TOL_MW = 1e-5


@dataclass(frozen=True)
class Scenario:
    attack: AttackPlan
    realization: UncertaintyRealization
    realized_loads: Tuple[float, ...]
    realized_wind: Tuple[float, ...]

    @classmethod
    def from_plans(cls, case, attack, realization):
        return cls(attack, realization,
                   tuple(float(v) for v in realization.realized_loads(case)),
                   tuple(float(v) for v in realization.realized_wind(case)))

    @classmethod
    def nominal(cls, case):
        """No attack, every factor at zero."""
        return cls.from_plans(case, AttackPlan.none(case), UncertaintyRealization.nominal(case))

    def signature(self):
        return "%s|z:%s" % (self.attack.signature(), self.realization.signature())


@dataclass(frozen=True)
class MasterSolution:
    defense: DefensePlan
    xi: float
    per_scenario_shed: Tuple[float, ...]
    stats: Dict[str, float] = field(default_factory=dict)


def add_scenario(scenarios, new):
    """New scenario tuple with *new* appended; a repeat is a stall."""
    signature = new.signature()
    if any(s.signature() == signature for s in scenarios):
        raise DuplicateScenarioError(signature)
    return tuple(scenarios) + (new,)


def _add_dispatch_block(mb, case, scenario, m, angle_bound):
    to_pu = case.to_pu
    sfx = "_s%d" % m
    ref = case.reference_bus
    for bus in case.buses:
        bound = 0.0 if bus.id == ref else angle_bound
        mb.add_variable("delta_%s%s" % (bus.id, sfx), lower=-bound, upper=bound)
    for branch in case.branches:
        limit = to_pu(branch.flow_limit)
        mb.add_variable("pf_%s%s" % (branch.id, sfx), lower=-limit, upper=limit)
    for gen in case.generators:
        mb.add_variable("pg_%s%s" % (gen.id, sfx), upper=to_pu(gen.p_max))
    for pos, farm in enumerate(case.wind_farms):
        mb.add_variable("pw_%s%s" % (farm.id, sfx), upper=to_pu(scenario.realized_wind[pos]))
    for pos, load in enumerate(case.loads):
        mb.add_variable("shed_%s%s" % (load.id, sfx), upper=to_pu(scenario.realized_loads[pos]))

    susceptance = susceptances_pu(case)
    for pos, branch in enumerate(case.branches):
        b = susceptance[pos]
        pf = "pf_%s%s" % (branch.id, sfx)
        flow = [(pf, 1.0), ("delta_%s%s" % (branch.from_bus, sfx), -b),
                ("delta_%s%s" % (branch.to_bus, sfx), b)]
        if scenario.attack.branch_intact[pos]:
            mb.add_constraint("flow_%s%s" % (branch.id, sfx), flow, EQ, 0.0)
            continue
        w = "w_f_%s" % branch.id
        big_m = 2.0 * angle_bound * b + to_pu(branch.flow_limit)
        mb.add_constraint("flow_on_up_%s%s" % (branch.id, sfx), flow + [(w, big_m)], LE, big_m)
        mb.add_constraint("flow_on_lo_%s%s" % (branch.id, sfx), flow + [(w, -big_m)], GE, -big_m)
        limit = to_pu(branch.flow_limit)
        mb.add_constraint("flow_off_up_%s%s" % (branch.id, sfx), [(pf, 1.0), (w, -limit)], LE, 0.0)
        mb.add_constraint("flow_off_lo_%s%s" % (branch.id, sfx), [(pf, 1.0), (w, limit)], GE, 0.0)

    for pos, gen in enumerate(case.generators):
        if not scenario.attack.gen_intact[pos]:
            mb.add_constraint("gen_on_%s%s" % (gen.id, sfx),
                              [("pg_%s%s" % (gen.id, sfx), 1.0),
                               ("w_g_%s" % gen.id, -to_pu(gen.p_max))], LE, 0.0)

    for bus in case.buses:
        terms = [("pg_%s%s" % (case.generators[j].id, sfx), 1.0)
                 for j in case.generators_at.get(bus.id, ())]
        terms += [("pw_%s%s" % (case.wind_farms[k].id, sfx), 1.0)
                  for k in case.wind_at.get(bus.id, ())]
        demand = 0.0
        for i in case.loads_at.get(bus.id, ()):
            terms.append(("shed_%s%s" % (case.loads[i].id, sfx), 1.0))
            demand += scenario.realized_loads[i]
        for pos in case.branches_at.get(bus.id, ()):
            branch = case.branches[pos]
            terms.append(("pf_%s%s" % (branch.id, sfx), -1.0 if branch.from_bus == bus.id else 1.0))
        mb.add_constraint("balance_%s%s" % (bus.id, sfx), terms, EQ, to_pu(demand))

    mb.add_constraint("worst%s" % sfx, [("xi", 1.0)] + [("shed_%s%s" % (load.id, sfx), -1.0)
                                                       for load in case.loads], GE, 0.0)


def build_master(case, scenarios, bigm=None):
    """Master MILP over *scenarios* (minimize, objective in MW)."""
    if not scenarios:
        raise EmptyScenarioSetError("the master problem needs at least one scenario")
    bigm = bigm or BigMConfig()
    mb = ModelBuilder("master")
    for branch in case.branches:
        mb.add_variable("w_f_%s" % branch.id, BINARY)
    for gen in case.generators:
        mb.add_variable("w_g_%s" % gen.id, BINARY)
    mb.add_variable("xi", lower=0.0)

    costs = [("w_f_%s" % br.id, br.defense_cost) for br in case.branches]
    costs += [("w_g_%s" % g.id, g.defense_cost) for g in case.generators]
    if costs:
        mb.add_constraint("defense_budget", costs, LE, case.budgets.defense_budget)

    angle_bound = max(bigm.angle_bound_rad, angle_span(case))
    for m, scenario in enumerate(scenarios, start=1):
        _add_dispatch_block(mb, case, scenario, m, angle_bound)

    mb.set_objective([("xi", case.base_mva)], MINIMIZE)
    return mb.build()


def solve_master(case, scenarios, bigm=None, backend=None, dump_path=None):
    """Optimal defense for *scenarios*, with every scenario re-checked
    by an independent dispatch solve."""
    backend = backend or get_backend()
    model = build_master(case, scenarios, bigm)
    if dump_path:
        with open(dump_path, "w", encoding="utf-8") as f:
            f.write(model.dump())
    outcome = backend.require_optimal(model, backend.solve_milp(model))
    defense = DefensePlan(
        tuple(int(round(outcome.value(model, "w_f_%s" % br.id))) for br in case.branches),
        tuple(int(round(outcome.value(model, "w_g_%s" % g.id))) for g in case.generators))
    xi = max(0.0, outcome.objective)

    sheds = tuple(solve_dispatch(case, defense, s.attack, s.realization, backend).total_shed
                  for s in scenarios)
    if abs(max(sheds) - xi) > POST_CHECK_TOL_MW:
        log.error("Master post-check failed for %s: xi %.6f MW, re-solved max %.6f MW",
                  defense.signature(), xi, max(sheds))
        raise PostCheckError("master value disagrees with its scenario re-solves "
                             "(angle bound or linearization)", expected=xi, actual=max(sheds))
    log.debug("Master over %d scenarios: xi=%.4f MW defense=%s", len(scenarios), xi,
              defense.signature())
    return MasterSolution(defense=defense, xi=xi, per_scenario_shed=sheds,
                          stats=dict(outcome.stats))

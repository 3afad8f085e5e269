# -*- coding: utf-8 -*-
"""
Operator re-dispatch: the DC load-shedding LP.

Given a defense, an attack and an uncertainty realization, the operator
minimizes total load shed subject to DC flow definitions, bus balance,
branch limits, surviving generator capacity, available wind and
realized demand.  The LP is always feasible: shedding every load with
all injections at zero satisfies every row.

Everything is built in per-unit on the case base; results come back in
MW.  The returned duals follow the sign convention documented in
``src.solver.model``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.exceptions import BackendFailure
from src.grid.case import susceptances_pu
from src.optimization.plans import AttackPlan, DefensePlan, survival
from src.solver.backend import get_backend
from src.solver.model import EQ, MINIMIZE, ModelBuilder

log = logging.getLogger(__name__)

__all__ = ["survival", "DefensePlan", "AttackPlan", "DispatchDuals", "DispatchResult",
           "build_dispatch_model", "solve_dispatch", "dispatch_dual_objective"]


@dataclass(frozen=True)
class DispatchDuals:
    """Duals per family, per-unit objective units, case order."""
    lam: Tuple[float, ...]          # bus balance
    mu: Tuple[float, ...]           # flow definition (0 for destroyed branches)
    flow_lower: Tuple[float, ...]   # p_f >= -F, >= 0
    flow_upper: Tuple[float, ...]   # p_f <= F, <= 0
    gamma: Tuple[float, ...]        # p_g <= s * P, <= 0
    beta: Tuple[float, ...]         # p_w <= W, <= 0
    alpha: Tuple[float, ...]        # shed <= D, <= 0


@dataclass(frozen=True)
class DispatchResult:
    gen_output: Tuple[float, ...]
    wind_output: Tuple[float, ...]
    flows: Tuple[float, ...]
    angles: Tuple[float, ...]
    shed: Tuple[float, ...]
    total_shed: float
    duals: DispatchDuals
    realized_loads: Tuple[float, ...]
    realized_wind: Tuple[float, ...]
    branch_in_service: Tuple[int, ...]
    gen_in_service: Tuple[int, ...]


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

def build_dispatch_model(case, branch_alive, gen_alive, loads_mw, wind_mw):
    """Dispatch LP for given survival vectors and realized MW values."""
    to_pu = case.to_pu
    mb = ModelBuilder("dispatch")
    ref = case.reference_bus
    for bus in case.buses:
        fixed = bus.id == ref
        mb.add_variable("delta_%s" % bus.id, lower=0.0 if fixed else -np.inf,
                        upper=0.0 if fixed else np.inf)
    for pos, branch in enumerate(case.branches):
        limit = to_pu(branch.flow_limit) if branch_alive[pos] else 0.0
        mb.add_variable("pf_%s" % branch.id, lower=-limit, upper=limit)
    for pos, gen in enumerate(case.generators):
        mb.add_variable("pg_%s" % gen.id, upper=to_pu(gen.p_max) if gen_alive[pos] else 0.0)
    for pos, farm in enumerate(case.wind_farms):
        mb.add_variable("pw_%s" % farm.id, upper=to_pu(wind_mw[pos]))
    for pos, load in enumerate(case.loads):
        mb.add_variable("shed_%s" % load.id, upper=to_pu(loads_mw[pos]))

    susceptance = susceptances_pu(case)
    for pos, branch in enumerate(case.branches):
        if not branch_alive[pos]:
            continue
        b = susceptance[pos]
        mb.add_constraint("flow_%s" % branch.id,
                          [("pf_%s" % branch.id, 1.0),
                           ("delta_%s" % branch.from_bus, -b),
                           ("delta_%s" % branch.to_bus, b)], EQ, 0.0)

    for bus in case.buses:
        terms = []
        for j in case.generators_at.get(bus.id, ()):
            terms.append(("pg_%s" % case.generators[j].id, 1.0))
        for k in case.wind_at.get(bus.id, ()):
            terms.append(("pw_%s" % case.wind_farms[k].id, 1.0))
        demand = 0.0
        for i in case.loads_at.get(bus.id, ()):
            terms.append(("shed_%s" % case.loads[i].id, 1.0))
            demand += loads_mw[i]
        for pos in case.branches_at.get(bus.id, ()):
            branch = case.branches[pos]
            sign = 1.0 if branch.from_bus == bus.id else -1.0
            terms.append(("pf_%s" % branch.id, -sign))
        mb.add_constraint("balance_%s" % bus.id, terms, EQ, to_pu(demand))

    mb.set_objective([("shed_%s" % load.id, 1.0) for load in case.loads], MINIMIZE)
    return mb.build()


def _alive(defense, attack):
    branches = tuple(survival(w, v) for w, v in zip(defense.branch_defend, attack.branch_intact))
    gens = tuple(survival(w, v) for w, v in zip(defense.gen_defend, attack.gen_intact))
    return branches, gens


def solve_dispatch(case, defense, attack, realization, backend=None):
    """Minimum total shed (MW) for one (defense, attack, realization)."""
    backend = backend or get_backend()
    branch_alive, gen_alive = _alive(defense, attack)
    loads_mw = realization.realized_loads(case)
    wind_mw = realization.realized_wind(case)
    return solve_dispatch_values(case, branch_alive, gen_alive, loads_mw, wind_mw, backend)


def solve_dispatch_values(case, branch_alive, gen_alive, loads_mw, wind_mw, backend=None):
    """``solve_dispatch`` on explicit survival vectors and MW values."""
    backend = backend or get_backend()
    model = build_dispatch_model(case, branch_alive, gen_alive, loads_mw, wind_mw)
    outcome = backend.solve_lp(model)
    if not outcome.is_optimal:
        # Full shedding is always feasible; anything else is numerical.
        raise BackendFailure("dispatch LP ended with status %s: %s" % (
            outcome.status, outcome.message), status=outcome.status)

    x = outcome.primal
    lower_d, upper_d = outcome.lower_duals, outcome.upper_duals

    def pick(prefix, items, array):
        return tuple(float(array[model.index_of("%s_%s" % (prefix, item.id))]) for item in items)

    row_pos = {con.name: r for r, con in enumerate(model.constraints)}
    mu = tuple(float(outcome.row_duals[row_pos["flow_%s" % br.id]]) if branch_alive[p] else 0.0
               for p, br in enumerate(case.branches))
    lam = tuple(float(outcome.row_duals[row_pos["balance_%s" % bus.id]]) for bus in case.buses)

    duals = DispatchDuals(
        lam=lam, mu=mu,
        flow_lower=pick("pf", case.branches, lower_d),
        flow_upper=pick("pf", case.branches, upper_d),
        gamma=pick("pg", case.generators, upper_d),
        beta=pick("pw", case.wind_farms, upper_d),
        alpha=pick("shed", case.loads, upper_d),
    )
    to_mw = case.to_mw
    shed = tuple(to_mw(v) for v in pick("shed", case.loads, x))
    # Clip solver noise; the LP objective is exact to tolerance.
    total = max(0.0, to_mw(outcome.objective))
    return DispatchResult(
        gen_output=tuple(to_mw(v) for v in pick("pg", case.generators, x)),
        wind_output=tuple(to_mw(v) for v in pick("pw", case.wind_farms, x)),
        flows=tuple(to_mw(v) for v in pick("pf", case.branches, x)),
        angles=pick("delta", case.buses, x),
        shed=shed,
        total_shed=total,
        duals=duals,
        realized_loads=tuple(float(v) for v in loads_mw),
        realized_wind=tuple(float(v) for v in wind_mw),
        branch_in_service=tuple(branch_alive),
        gen_in_service=tuple(gen_alive),
    )


def dispatch_dual_objective(case, result):
    """Dual objective (MW) assembled family by family from the duals:
    generator, wind, flow-bound and demand terms."""
    d = result.duals
    to_pu = case.to_pu
    total = 0.0
    for pos, gen in enumerate(case.generators):
        total += d.gamma[pos] * to_pu(gen.p_max) * result.gen_in_service[pos]
    for pos in range(len(case.wind_farms)):
        total += d.beta[pos] * to_pu(result.realized_wind[pos])
    for pos, branch in enumerate(case.branches):
        limit = to_pu(branch.flow_limit) * result.branch_in_service[pos]
        total += limit * (d.flow_upper[pos] - d.flow_lower[pos])
    for pos, load in enumerate(case.loads):
        lam = d.lam[case.bus_position[load.bus]]
        total += (lam + d.alpha[pos]) * to_pu(result.realized_loads[pos])
    return case.to_mw(total)

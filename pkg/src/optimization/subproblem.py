# -*- coding: utf-8 -*-
"""
Attacker + nature subproblem.

For a fixed defense, the attacker and nature maximize the operator's
minimum shed.  The inner dispatch LP is replaced by its dual, giving a
single maximization in which the survival indicators multiply dual
variables and the binary uncertainty factors multiply the dual
objective.  Each binary x continuous product ``y = b * x`` with
``x`` in ``[L, U]`` is replaced by the exact envelope::

    L*b <= y <= U*b
    x - U*(1 - b) <= y <= x - L*(1 - b)

The dual is derived once, symbolically, by ``derive_dual_model``; the
same description is instantiated either as a plain LP for fixed
``(v, z)`` or as the subproblem MILP.

Dual bounds (per unit of shed): lambda, alpha, gamma, beta have base 1;
mu and the flow-bound duals have base 4 (two incidences plus two bound
duals).  On a meshed network the prices can exceed the shed price by
the spread of branch susceptances around a loop, so every base is
multiplied by ``1 + b_max / b_min`` when the branch graph has a cycle,
and then by the safety factor.  A subproblem whose confirmation
dispatch disagrees is re-solved with every bound scaled by
``RESCALE_FACTOR``, at most ``max_rescales`` times.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from src.core.exceptions import BigMError, PostCheckError
from src.grid.case import susceptances_pu
from src.grid.uncertainty import UncertaintyRealization
from src.optimization.dispatch import solve_dispatch
from src.optimization.plans import AttackPlan
from src.solver.backend import get_backend
from src.solver.model import BINARY, EQ, GE, LE, MAXIMIZE, ModelBuilder

log = logging.getLogger(__name__)

CONFIRM_TOL_MW = 1e-5
RESCALE_FACTOR = 10.0

FREE, NONNEG, NONPOS = "free", "nonneg", "nonpos"

# analytic dual bounds with a unit safety factor
BASE_DUAL_BOUNDS = {
    "lam": 1.0,
    "alpha": 1.0,
    "gam": 1.0,
    "beta": 1.0,
    "mu": 4.0,
    "theta": 4.0,
}


# ---------------------------------------------------------------------------
# Big-M configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BigMConfig:
    safety_factor: float = 10.0
    angle_bound_rad: float = math.pi
    dual_bound_m: Optional[float] = None
    overrides: Tuple[Tuple[str, float], ...] = ()
    max_rescales: int = 3

    def __post_init__(self):
        if not self.safety_factor > 0:
            raise BigMError("safety_factor must be > 0 (got %r)" % self.safety_factor)
        if not self.angle_bound_rad > 0:
            raise BigMError("angle_bound_rad must be > 0 (got %r)" % self.angle_bound_rad)
        if self.dual_bound_m is not None and not self.dual_bound_m > 0:
            raise BigMError("dual_bound_m must be > 0 (got %r)" % self.dual_bound_m)
        if self.max_rescales < 0:
            raise BigMError("max_rescales must be >= 0 (got %r)" % self.max_rescales)
        object.__setattr__(self, "overrides", tuple(dict(self.overrides).items()))
        for family, value in self.overrides:
            if family not in BASE_DUAL_BOUNDS:
                raise BigMError("unknown dual family %r in overrides" % family)
            if not value > 0:
                raise BigMError("override for %s must be > 0 (got %r)" % (family, value))

    @classmethod
    def from_config(cls, config):
        return cls(safety_factor=config.get_float("bigm", "safety_factor", 10.0),
                   angle_bound_rad=config.get_float("bigm", "angle_bound_rad", math.pi),
                   max_rescales=config.get_int("bigm", "max_rescales", 3))

    def dual_bounds(self, case=None):
        """Bound per dual family; rejects any bound under its analytic base.

        With a *case*, the safety factor is applied on top of the case's
        price spread.  An explicit ``dual_bound_m`` replaces both.
        """
        if self.dual_bound_m is not None:
            scale = self.dual_bound_m
        else:
            scale = self.safety_factor * (price_spread(case) if case is not None else 1.0)
        bounds = {family: base * scale for family, base in BASE_DUAL_BOUNDS.items()}
        bounds.update(dict(self.overrides))
        too_small = ["%s=%r < %r" % (f, bounds[f], base)
                     for f, base in BASE_DUAL_BOUNDS.items() if bounds[f] < base]
        if too_small:
            raise BigMError("big-M dual bounds below their analytic minimum: %s" % ", ".join(too_small))
        return bounds

    def scaled(self, factor):
        """Every bound multiplied by *factor*."""
        return dataclasses.replace(
            self,
            safety_factor=self.safety_factor * factor,
            angle_bound_rad=self.angle_bound_rad * factor,
            dual_bound_m=None if self.dual_bound_m is None else self.dual_bound_m * factor,
            overrides=tuple((f, v * factor) for f, v in self.overrides),
        )


def price_spread(case):
    """``1 + b_max / b_min`` when the branch graph has a cycle, else 1."""
    if not case.branches:
        return 1.0
    n = len(case.buses)
    ends = np.array([(case.bus_position[br.from_bus], case.bus_position[br.to_bus])
                     for br in case.branches])
    graph = coo_matrix((np.ones(len(ends)), (ends[:, 0], ends[:, 1])), shape=(n, n))
    components, _ = connected_components(graph, directed=False)
    if len(case.branches) - n + components <= 0:
        return 1.0
    b = susceptances_pu(case)
    return 1.0 + float(b.max() / b.min())


# ---------------------------------------------------------------------------
# Symbolic dual
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualVariable:
    name: str
    family: str
    element: int
    sign: str


@dataclass(frozen=True)
class DualTerm:
    variable: str
    coefficient: float
    # ("branch", pos) or ("gen", pos): coefficient is multiplied by v at pos
    survival: Optional[Tuple[str, int]] = None


@dataclass(frozen=True)
class DualRow:
    name: str
    primal_variable: str
    terms: Tuple[DualTerm, ...]
    sense: str
    rhs: float


@dataclass(frozen=True)
class ObjectiveTerm:
    variable: str
    coefficient: float
    # "const", or ("load", pos) / ("wind", pos): coefficient times realized pu value
    scale: object = "const"


@dataclass(frozen=True)
class DualModel:
    variables: Tuple[DualVariable, ...]
    rows: Tuple[DualRow, ...]
    objective: Tuple[ObjectiveTerm, ...]

    def variable(self, name):
        for var in self.variables:
            if var.name == name:
                return var
        raise KeyError(name)

    def instantiate(self, case, attack, realization, objective_scale=1.0):
        """Dual LP for fixed survival and realization (maximize)."""
        loads_pu = realization.realized_loads(case) / case.base_mva
        wind_pu = realization.realized_wind(case) / case.base_mva
        mb = ModelBuilder("dispatch_dual")
        for var in self.variables:
            mb.add_variable(var.name, lower=0.0 if var.sign == NONNEG else -np.inf,
                            upper=0.0 if var.sign == NONPOS else np.inf)
        for row in self.rows:
            terms = []
            for term in row.terms:
                factor = 1.0
                if term.survival is not None:
                    kind, pos = term.survival
                    factor = attack.branch_intact[pos] if kind == "branch" else attack.gen_intact[pos]
                if factor:
                    terms.append((term.variable, term.coefficient * factor))
            if terms:
                mb.add_constraint(row.name, terms, row.sense, row.rhs)
        objective = []
        for term in self.objective:
            value = term.coefficient
            if term.scale != "const":
                kind, pos = term.scale
                value *= loads_pu[pos] if kind == "load" else wind_pu[pos]
            objective.append((term.variable, value * objective_scale))
        mb.set_objective(objective, MAXIMIZE)
        return mb.build()


def derive_dual_model(case, defense):
    """Dual of the dispatch LP for fixed defense, in symbolic form.

    One dual variable per primal row or bound: ``lam`` (bus balance),
    ``mu`` (flow definition), ``th_lo``/``th_up`` (flow limits),
    ``gam`` (generator capacity), ``beta`` (available wind), ``alpha``
    (realized demand).  One dual row per primal variable: angle, flow,
    generator, wind and shed.  Survival of an undefended element
    appears as a ``survival`` tag on the terms it multiplies.
    """
    to_pu = case.to_pu
    variables = []
    for bus in case.buses:
        variables.append(DualVariable("lam_%s" % bus.id, "lam", bus.id, FREE))
    for branch in case.branches:
        variables.append(DualVariable("mu_%s" % branch.id, "mu", branch.id, FREE))
        variables.append(DualVariable("th_lo_%s" % branch.id, "theta", branch.id, NONNEG))
        variables.append(DualVariable("th_up_%s" % branch.id, "theta", branch.id, NONPOS))
    for gen in case.generators:
        variables.append(DualVariable("gam_%s" % gen.id, "gam", gen.id, NONPOS))
    for farm in case.wind_farms:
        variables.append(DualVariable("beta_%s" % farm.id, "beta", farm.id, NONPOS))
    for load in case.loads:
        variables.append(DualVariable("alpha_%s" % load.id, "alpha", load.id, NONPOS))

    def branch_tag(pos):
        return None if defense.branch_defend[pos] else ("branch", pos)

    def gen_tag(pos):
        return None if defense.gen_defend[pos] else ("gen", pos)

    rows = []
    # angle: sum over incident branches of -A_nl * s_l * b_l * mu_l = 0
    for bus in case.buses:
        terms = []
        for pos in case.branches_at.get(bus.id, ()):
            branch = case.branches[pos]
            a_nl = 1.0 if branch.from_bus == bus.id else -1.0
            terms.append(DualTerm("mu_%s" % branch.id, -a_nl / branch.reactance_x, branch_tag(pos)))
        if terms:
            rows.append(DualRow("stat_delta_%s" % bus.id, "delta_%s" % bus.id, tuple(terms), EQ, 0.0))
    # flow: mu_l - sum_n A_nl lam_n + th_lo + th_up = 0
    for branch in case.branches:
        rows.append(DualRow("stat_pf_%s" % branch.id, "pf_%s" % branch.id, (
            DualTerm("mu_%s" % branch.id, 1.0),
            DualTerm("lam_%s" % branch.from_bus, -1.0),
            DualTerm("lam_%s" % branch.to_bus, 1.0),
            DualTerm("th_lo_%s" % branch.id, 1.0),
            DualTerm("th_up_%s" % branch.id, 1.0),
        ), EQ, 0.0))
    for pos, gen in enumerate(case.generators):
        rows.append(DualRow("stat_pg_%s" % gen.id, "pg_%s" % gen.id, (
            DualTerm("lam_%s" % gen.bus, 1.0, gen_tag(pos)),
            DualTerm("gam_%s" % gen.id, 1.0),
        ), LE, 0.0))
    for farm in case.wind_farms:
        rows.append(DualRow("stat_pw_%s" % farm.id, "pw_%s" % farm.id, (
            DualTerm("lam_%s" % farm.bus, 1.0),
            DualTerm("beta_%s" % farm.id, 1.0),
        ), LE, 0.0))
    for load in case.loads:
        rows.append(DualRow("stat_shed_%s" % load.id, "shed_%s" % load.id, (
            DualTerm("lam_%s" % load.bus, 1.0),
            DualTerm("alpha_%s" % load.id, 1.0),
        ), LE, 1.0))

    objective = []
    for gen in case.generators:
        objective.append(ObjectiveTerm("gam_%s" % gen.id, to_pu(gen.p_max)))
    for branch in case.branches:
        objective.append(ObjectiveTerm("th_up_%s" % branch.id, to_pu(branch.flow_limit)))
        objective.append(ObjectiveTerm("th_lo_%s" % branch.id, -to_pu(branch.flow_limit)))
    for pos, farm in enumerate(case.wind_farms):
        objective.append(ObjectiveTerm("beta_%s" % farm.id, 1.0, ("wind", pos)))
    for pos, load in enumerate(case.loads):
        objective.append(ObjectiveTerm("lam_%s" % load.bus, 1.0, ("load", pos)))
        objective.append(ObjectiveTerm("alpha_%s" % load.id, 1.0, ("load", pos)))

    return DualModel(tuple(variables), tuple(rows), tuple(objective))


# ---------------------------------------------------------------------------
# Subproblem MILP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubproblemModel:
    model: object
    case: object
    defense: object


@dataclass(frozen=True)
class SubproblemSolution:
    attack: AttackPlan
    realization: UncertaintyRealization
    eta: float
    duals: Dict[str, float] = field(default_factory=dict)
    confirmed_shed: float = 0.0
    stats: Dict[str, float] = field(default_factory=dict)


def _add_product(mb, name, binary, x_name, lower, upper):
    """y = binary * x with x in [lower, upper]."""
    mb.add_variable(name, lower=min(lower, 0.0), upper=max(upper, 0.0))
    mb.add_constraint("%s_lo" % name, [(name, 1.0), (binary, -lower)], GE, 0.0)
    mb.add_constraint("%s_up" % name, [(name, 1.0), (binary, -upper)], LE, 0.0)
    mb.add_constraint("%s_xlo" % name, [(name, 1.0), (x_name, -1.0), (binary, -upper)], GE, -upper)
    mb.add_constraint("%s_xup" % name, [(name, 1.0), (x_name, -1.0), (binary, -lower)], LE, -lower)


def build_subproblem(case, defense, bigm=None):
    """Single-level MILP of the attacker + nature problem (maximize,
    objective in MW)."""
    bigm = bigm or BigMConfig()
    bounds = bigm.dual_bounds(case)
    dual = derive_dual_model(case, defense)
    to_pu = case.to_pu
    scale = case.base_mva
    mb = ModelBuilder("subproblem")

    # attack and uncertainty binaries
    attackable = []
    for pos, branch in enumerate(case.branches):
        if not defense.branch_defend[pos]:
            attackable.append(("v_f_%s" % branch.id, branch.attack_cost))
            mb.add_variable("v_f_%s" % branch.id, BINARY)
    for pos, gen in enumerate(case.generators):
        if not defense.gen_defend[pos]:
            attackable.append(("v_g_%s" % gen.id, gen.attack_cost))
            mb.add_variable("v_g_%s" % gen.id, BINARY)
    for load in case.loads:
        mb.add_variable("zd_up_%s" % load.id, BINARY)
        mb.add_variable("zd_dn_%s" % load.id, BINARY)
    for farm in case.wind_farms:
        mb.add_variable("zw_up_%s" % farm.id, BINARY)
        mb.add_variable("zw_dn_%s" % farm.id, BINARY)

    # duals with big-M boxes
    for var in dual.variables:
        m = bounds[var.family]
        mb.add_variable(var.name, lower=0.0 if var.sign == NONNEG else -m,
                        upper=0.0 if var.sign == NONPOS else m)

    # survival products
    product_of = {}
    for pos, branch in enumerate(case.branches):
        if not defense.branch_defend[pos]:
            name = "q_mu_%s" % branch.id
            _add_product(mb, name, "v_f_%s" % branch.id, "mu_%s" % branch.id,
                         -bounds["mu"], bounds["mu"])
            product_of[("branch", pos)] = name
    for pos, gen in enumerate(case.generators):
        if not defense.gen_defend[pos]:
            name = "q_lam_%s" % gen.id
            _add_product(mb, name, "v_g_%s" % gen.id, "lam_%s" % gen.bus,
                         -bounds["lam"], bounds["lam"])
            product_of[("gen", pos)] = name

    for row in dual.rows:
        terms = [(product_of[t.survival] if t.survival is not None else t.variable, t.coefficient)
                 for t in row.terms]
        mb.add_constraint(row.name, terms, row.sense, row.rhs)

    # objective
    objective = []
    for term in dual.objective:
        if term.scale == "const":
            objective.append((term.variable, term.coefficient * scale))
    phi_lower = -(bounds["lam"] + bounds["alpha"])
    for pos, load in enumerate(case.loads):
        phi = "phi_%s" % load.id
        mb.add_variable(phi, lower=phi_lower, upper=1.0)
        mb.add_constraint("def_%s" % phi, [(phi, 1.0), ("lam_%s" % load.bus, -1.0),
                                          ("alpha_%s" % load.id, -1.0)], EQ, 0.0)
        _add_product(mb, "y_up_%s" % load.id, "zd_up_%s" % load.id, phi, phi_lower, 1.0)
        _add_product(mb, "y_dn_%s" % load.id, "zd_dn_%s" % load.id, phi, phi_lower, 1.0)
        objective.append((phi, to_pu(load.expected_mw) * scale))
        objective.append(("y_up_%s" % load.id, to_pu(load.dev_up_mw) * scale))
        objective.append(("y_dn_%s" % load.id, -to_pu(load.dev_down_mw) * scale))
    for farm in case.wind_farms:
        beta = "beta_%s" % farm.id
        _add_product(mb, "yw_up_%s" % farm.id, "zw_up_%s" % farm.id, beta, -bounds["beta"], 0.0)
        _add_product(mb, "yw_dn_%s" % farm.id, "zw_dn_%s" % farm.id, beta, -bounds["beta"], 0.0)
        objective.append((beta, to_pu(farm.expected_mw) * scale))
        objective.append(("yw_up_%s" % farm.id, to_pu(farm.dev_up_mw) * scale))
        objective.append(("yw_dn_%s" % farm.id, -to_pu(farm.dev_down_mw) * scale))

    # attack budget: sum c * (1 - v) <= r
    if attackable:
        mb.add_constraint("attack_budget", [(name, -cost) for name, cost in attackable], LE,
                          case.budgets.attack_budget - sum(cost for _, cost in attackable))
    # pairing and uncertainty budgets
    for load in case.loads:
        mb.add_constraint("pair_d_%s" % load.id, [("zd_up_%s" % load.id, 1.0),
                                                  ("zd_dn_%s" % load.id, 1.0)], LE, 1.0)
    for farm in case.wind_farms:
        mb.add_constraint("pair_w_%s" % farm.id, [("zw_up_%s" % farm.id, 1.0),
                                                  ("zw_dn_%s" % farm.id, 1.0)], LE, 1.0)
    if case.loads:
        mb.add_constraint("load_budget",
                          [("zd_%s_%s" % (d, load.id), 1.0) for load in case.loads for d in ("up", "dn")],
                          LE, case.budgets.load_uncertainty_budget)
    if case.wind_farms:
        mb.add_constraint("wind_budget",
                          [("zw_%s_%s" % (d, farm.id), 1.0) for farm in case.wind_farms for d in ("up", "dn")],
                          LE, case.budgets.wind_uncertainty_budget)

    mb.set_objective(objective, MAXIMIZE)
    return SubproblemModel(model=mb.build(), case=case, defense=defense)


def _extract(sub, outcome):
    case, model, defense = sub.case, sub.model, sub.defense

    def val(name):
        return outcome.value(model, name)

    branch_intact = tuple(1 if defense.branch_defend[p] else int(round(val("v_f_%s" % br.id)))
                          for p, br in enumerate(case.branches))
    gen_intact = tuple(1 if defense.gen_defend[p] else int(round(val("v_g_%s" % g.id)))
                       for p, g in enumerate(case.generators))
    realization = UncertaintyRealization(
        tuple(round(val("zd_up_%s" % l.id)) for l in case.loads),
        tuple(round(val("zd_dn_%s" % l.id)) for l in case.loads),
        tuple(round(val("zw_up_%s" % f.id)) for f in case.wind_farms),
        tuple(round(val("zw_dn_%s" % f.id)) for f in case.wind_farms),
    )
    duals = {v.name: val(v.name) for v in model.variables
             if v.name.split("_")[0] in ("lam", "mu", "th", "gam", "beta", "alpha")}
    return AttackPlan(branch_intact, gen_intact), realization, duals


def solve_subproblem(case, defense, bigm=None, backend=None, dump_path=None):
    """Worst (attack, realization) for *defense*, confirmed by dispatch.

    A confirmation mismatch re-solves with every bound scaled by
    ``RESCALE_FACTOR``; ``PostCheckError`` once ``max_rescales`` is spent.
    """
    backend = backend or get_backend()
    bigm = bigm or BigMConfig()
    rescales = 0
    while True:
        sub = build_subproblem(case, defense, bigm)
        if dump_path:
            with open(dump_path, "w", encoding="utf-8") as f:
                f.write(sub.model.dump())
        outcome = backend.require_optimal(sub.model, backend.solve_milp(sub.model))
        attack, realization, duals = _extract(sub, outcome)
        eta = max(0.0, outcome.objective)

        confirmed = solve_dispatch(case, defense, attack, realization, backend).total_shed
        if abs(confirmed - eta) <= CONFIRM_TOL_MW:
            break
        if rescales >= bigm.max_rescales:
            log.error("Subproblem confirmation failed for %s: model %.6f MW, dispatch %.6f MW",
                      defense.signature(), eta, confirmed)
            raise PostCheckError("subproblem value disagrees with its confirmation dispatch "
                                 "(big-M bounds or dual derivation)", expected=eta, actual=confirmed)
        log.warning("Subproblem at %s: model %.6f MW vs dispatch %.6f MW; rescaling dual bounds "
                    "by %g", defense.signature(), eta, confirmed, RESCALE_FACTOR)
        bigm = bigm.scaled(RESCALE_FACTOR)
        rescales += 1

    log.debug("Subproblem at %s: eta=%.4f MW attack=%s realization=%s", defense.signature(),
              eta, attack.signature(), realization.signature())
    stats = dict(outcome.stats)
    stats["bigm_rescales"] = rescales
    return SubproblemSolution(attack=attack, realization=realization, eta=eta, duals=duals,
                              confirmed_shed=confirmed, stats=stats)

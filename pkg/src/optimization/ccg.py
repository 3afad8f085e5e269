# -*- coding: utf-8 -*-
"""
Column-and-constraint generation loop.

Master and subproblem alternate: the master gives a defense and a lower
bound, the subproblem gives the worst scenario for that defense and an
upper bound.  The worst scenario is added to the master (a new block of
dispatch columns and rows) until the bounds meet.
"""
from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass, field
from typing import Tuple

from src.core.exceptions import BoundCrossingError, DuplicateScenarioError, GridDefenseError
from src.grid.uncertainty import UncertaintyRealization
from src.optimization.master import Scenario, add_scenario, solve_master
from src.optimization.plans import AttackPlan, DefensePlan
from src.optimization.subproblem import BigMConfig, solve_subproblem
from src.solver.backend import get_backend

log = logging.getLogger(__name__)

CONVERGED, ITERATION_LIMIT, STALLED = "converged", "iteration-limit", "stalled"

BOUND_CROSSING_TOL_MW = 1e-4

# Column order of the convergence CSV.
CONVERGENCE_COLUMNS = ("iter", "lower_bound_mw", "upper_bound_mw", "scenario_signature")


@dataclass(frozen=True)
class CcgParams:
    gap_abs: float = 1e-4
    gap_rel: float = 1e-6
    max_iterations: int = 20
    bigm: BigMConfig = field(default_factory=BigMConfig)

    def __post_init__(self):
        if not (self.gap_abs > 0 or self.gap_rel > 0):
            raise ValueError("either gap_abs or gap_rel must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1 (got %r)" % self.max_iterations)

    @classmethod
    def from_config(cls, config):
        return cls(gap_abs=config.get_float("ccg", "gap_abs_mw", 1e-4),
                   gap_rel=config.get_float("ccg", "gap_rel", 1e-6),
                   max_iterations=config.get_int("ccg", "max_iterations", 20),
                   bigm=BigMConfig.from_config(config))


@dataclass(frozen=True)
class GapResult:
    value: float
    converged: bool


@dataclass(frozen=True)
class IterationRecord:
    index: int
    lower_bound: float
    upper_bound: float
    subproblem_value: float
    defense: DefensePlan
    scenario_signature: str
    master_time_s: float
    subproblem_time_s: float


@dataclass(frozen=True)
class CcgReport:
    iterations: Tuple[IterationRecord, ...]
    final_defense: DefensePlan
    final_loss: float
    worst_attack: AttackPlan
    worst_realization: UncertaintyRealization
    status: str
    total_time_s: float = 0.0

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def lower_bound(self):
        return self.iterations[-1].lower_bound if self.iterations else 0.0

    def convergence_rows(self):
        """Rows for the convergence CSV, in ``CONVERGENCE_COLUMNS`` order."""
        return [(r.index, r.lower_bound, r.upper_bound, r.scenario_signature)
                for r in self.iterations]


def gap(lb, ub, params):
    """Bound gap and convergence test; a crossing is a bug."""
    if lb > ub + BOUND_CROSSING_TOL_MW:
        raise BoundCrossingError(lb, ub)
    value = ub - lb
    return GapResult(value=value, converged=value <= max(params.gap_abs, params.gap_rel * ub))


def ccg_solve(case, params=None, backend=None, dump_dir=None):
    """Run C&CG from the nominal no-attack scenario."""
    params = params or CcgParams()
    backend = backend or get_backend()
    started = time.perf_counter()

    scenarios = (Scenario.nominal(case),)
    records = []
    lower = 0.0
    upper = math.inf
    best = None
    status = ITERATION_LIMIT

    for m in range(1, params.max_iterations + 1):
        try:
            t0 = time.perf_counter()
            master = solve_master(case, scenarios, params.bigm, backend,
                                  dump_path=_dump_path(dump_dir, "master", m))
            t1 = time.perf_counter()
            sub = solve_subproblem(case, master.defense, params.bigm, backend,
                                   dump_path=_dump_path(dump_dir, "subproblem", m))
            t2 = time.perf_counter()
        except GridDefenseError as e:
            log.error("C&CG iteration %d failed: %s", m, e)
            e.iteration = m
            raise

        lower = max(lower, master.xi)
        if sub.eta < upper:
            upper = sub.eta
            best = (master.defense, sub)
        new = Scenario.from_plans(case, sub.attack, sub.realization)
        result = gap(lower, upper, params)
        records.append(IterationRecord(m, lower, upper, sub.eta, master.defense,
                                       new.signature(), t1 - t0, t2 - t1))
        log.info("C&CG iter %d: LB=%.4f UB=%.4f gap=%.4g scenario=%s", m, lower, upper,
                 result.value, new.signature())
        if result.converged:
            status = CONVERGED
            break
        try:
            scenarios = add_scenario(scenarios, new)
        except DuplicateScenarioError as e:
            log.warning("C&CG stalled at iteration %d: %s", m, e)
            status = STALLED
            break

    defense, sub = best
    report = CcgReport(
        iterations=tuple(records),
        final_defense=defense,
        final_loss=upper,
        worst_attack=sub.attack,
        worst_realization=sub.realization,
        status=status,
        total_time_s=time.perf_counter() - started,
    )
    log.info("C&CG %s after %d iteration(s): loss %.4f MW", status, len(records), upper)
    return report


def _dump_path(dump_dir, kind, m):
    if not dump_dir:
        return None
    return os.path.join(dump_dir, "%s_iter%02d.lp.txt" % (kind, m))

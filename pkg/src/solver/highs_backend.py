# -*- coding: utf-8 -*-
"""
HiGHS backend through ``scipy.optimize``.

LPs go through ``linprog(method="highs")`` and report the HiGHS
marginals as duals; MILPs go through ``milp`` with the relative MIP gap
from the backend settings.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from src.core.exceptions import MipGapError, wrap_backend_error
from src.solver.backend import SolverBackend, register_backend
from src.solver.model import (EQ, ERROR, GE, INFEASIBLE, LE, MAXIMIZE, OPTIMAL, UNBOUNDED,
                              SolveOutcome)

log = logging.getLogger(__name__)

# scipy status codes shared by linprog and milp
_STATUS = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}

HIGHS_ABS_GAP = 1e-6


def _split_rows(model):
    """Rows as ``A_ub x <= b_ub`` and ``A_eq x = b_eq`` plus the mapping
    back to model row positions (``>=`` rows are negated)."""
    matrix = model.constraint_matrix()
    rhs = model.rhs()
    senses = model.senses()
    ub_rows = [r for r, s in enumerate(senses) if s in (LE, GE)]
    eq_rows = [r for r, s in enumerate(senses) if s == EQ]
    flip = np.array([-1.0 if senses[r] == GE else 1.0 for r in ub_rows])
    a_ub = matrix[ub_rows] if ub_rows else None
    b_ub = rhs[ub_rows] if ub_rows else None
    if ub_rows:
        a_ub = a_ub.multiply(flip[:, None]).tocsr()
        b_ub = b_ub * flip
    a_eq = matrix[eq_rows] if eq_rows else None
    b_eq = rhs[eq_rows] if eq_rows else None
    return a_ub, b_ub, a_eq, b_eq, ub_rows, eq_rows, flip


@register_backend
class HighsBackend(SolverBackend):
    """Reference backend."""

    name = "highs"

    def _solve_lp(self, model):
        return wrap_backend_error(self._linprog, model)

    def _linprog(self, model):
        sign = -1.0 if model.sense == MAXIMIZE else 1.0
        c = sign * model.objective_vector()
        a_ub, b_ub, a_eq, b_eq, ub_rows, eq_rows, flip = _split_rows(model)
        lower, upper = model.bounds()
        bounds = [(lo if np.isfinite(lo) else None, up if np.isfinite(up) else None)
                  for lo, up in zip(lower, upper)]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                      method="highs",
                      options={"primal_feasibility_tolerance": min(1e-7, self.settings.feasibility_tol),
                               "dual_feasibility_tolerance": 1e-9,
                               "time_limit": self.settings.time_limit_s})
        status = _STATUS.get(res.status, ERROR)
        if status != OPTIMAL:
            return SolveOutcome(status=status, message=res.message,
                                stats={"iterations": getattr(res, "nit", 0)})

        row_duals = np.zeros(model.n_rows)
        if ub_rows:
            row_duals[ub_rows] = np.asarray(res.ineqlin.marginals) * flip
        if eq_rows:
            row_duals[eq_rows] = np.asarray(res.eqlin.marginals)
        # Marginals are for the minimized objective sign * c.
        return SolveOutcome(
            status=OPTIMAL,
            objective=sign * float(res.fun) + model.objective_constant,
            primal=np.asarray(res.x, dtype=float),
            row_duals=sign * row_duals,
            lower_duals=sign * np.asarray(res.lower.marginals, dtype=float),
            upper_duals=sign * np.asarray(res.upper.marginals, dtype=float),
            stats={"iterations": float(res.nit)},
            message=res.message,
        )

    def _solve_milp(self, model):
        return wrap_backend_error(self._milp, model)

    def _milp(self, model):
        sign = -1.0 if model.sense == MAXIMIZE else 1.0
        c = sign * model.objective_vector()
        lower, upper = model.bounds()
        constraints = []
        if model.n_rows:
            rhs = model.rhs()
            senses = model.senses()
            row_lo = np.array([r if s in (GE, EQ) else -np.inf for r, s in zip(rhs, senses)])
            row_up = np.array([r if s in (LE, EQ) else np.inf for r, s in zip(rhs, senses)])
            constraints.append(LinearConstraint(model.constraint_matrix(), row_lo, row_up))
        res = milp(c, integrality=model.integrality(), bounds=Bounds(lower, upper),
                   constraints=constraints,
                   options={"mip_rel_gap": self.settings.mip_rel_gap,
                            "time_limit": self.settings.time_limit_s,
                            "node_limit": self.settings.node_limit,
                            "presolve": True, "disp": False})
        stats = {"nodes": float(getattr(res, "mip_node_count", 0) or 0),
                 "mip_gap": float(getattr(res, "mip_gap", 0.0) or 0.0)}
        if res.status == 1:
            raise MipGapError("model %s: stopped at a limit before proving optimality (%s)" % (
                model.name, res.message))
        status = _STATUS.get(res.status, ERROR)
        if status != OPTIMAL:
            return SolveOutcome(status=status, message=res.message, stats=stats)
        # HiGHS also stops on its absolute gap (1e-6 in objective units).
        if (stats["mip_gap"] > self.settings.mip_rel_gap
                and stats["mip_gap"] * abs(res.fun) > HIGHS_ABS_GAP):
            raise MipGapError("model %s: MIP gap %.3g above required %.3g" % (
                model.name, stats["mip_gap"], self.settings.mip_rel_gap))
        return SolveOutcome(
            status=OPTIMAL,
            objective=sign * float(res.fun) + model.objective_constant,
            primal=np.asarray(res.x, dtype=float),
            stats=stats,
            message=res.message,
        )

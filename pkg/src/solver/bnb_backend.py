# -*- coding: utf-8 -*-
"""
Best-first branch-and-bound over LP relaxations.

A small, independent MILP search used for tiny models and as a
cross-check of the reference backend's MILP answers.  Node relaxations
are solved with ``scipy.optimize.linprog``; branching picks the most
fractional binary, and the node queue is a ``heapq`` ordered by the
relaxation bound.
"""
from __future__ import annotations

import heapq
import itertools
import logging

import numpy as np
from scipy.optimize import linprog

from src.core.exceptions import MipGapError, wrap_backend_error
from src.solver.backend import register_backend
from src.solver.highs_backend import HighsBackend, _split_rows
from src.solver.model import ERROR, INFEASIBLE, MAXIMIZE, OPTIMAL, UNBOUNDED, SolveOutcome

log = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6


@register_backend
class BranchAndBoundBackend(HighsBackend):
    """Fallback backend; LPs go through the reference LP path."""

    name = "bnb"

    def _solve_milp(self, model):
        return wrap_backend_error(self._branch_and_bound, model)

    def _branch_and_bound(self, model):
        sign = -1.0 if model.sense == MAXIMIZE else 1.0
        c = sign * model.objective_vector()
        a_ub, b_ub, a_eq, b_eq, _, _, _ = _split_rows(model)
        root_lo, root_up = model.bounds()
        integral = np.flatnonzero(model.integrality())

        def relax(lower, upper):
            bounds = [(lo if np.isfinite(lo) else None, up if np.isfinite(up) else None)
                      for lo, up in zip(lower, upper)]
            return linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                           method="highs")

        counter = itertools.count()
        incumbent_x, incumbent = None, np.inf
        nodes = 0

        root = relax(root_lo, root_up)
        if root.status == 3:
            return SolveOutcome(status=UNBOUNDED, message=root.message)
        if root.status == 2:
            return SolveOutcome(status=INFEASIBLE, message=root.message)
        if root.status != 0:
            return SolveOutcome(status=ERROR, message=root.message)

        heap = [(root.fun, next(counter), root_lo.copy(), root_up.copy(), root.x)]
        while heap:
            bound, _, lower, upper, x = heapq.heappop(heap)
            if bound >= incumbent - self._prune_margin(incumbent):
                continue
            nodes += 1
            if nodes > self.settings.node_limit:
                raise MipGapError("model %s: node limit %d reached (incumbent %r, bound %r)" % (
                    model.name, self.settings.node_limit, incumbent, bound))

            fractional = np.abs(x[integral] - np.round(x[integral]))
            if integral.size == 0 or fractional.max() <= INTEGRALITY_TOL:
                incumbent, incumbent_x = bound, x
                continue

            branch_var = integral[int(np.argmax(fractional))]
            value = x[branch_var]
            for child_lo, child_up in ((lower[branch_var], np.floor(value)),
                                       (np.ceil(value), upper[branch_var])):
                lo, up = lower.copy(), upper.copy()
                lo[branch_var], up[branch_var] = child_lo, child_up
                res = relax(lo, up)
                if res.status == 0 and res.fun < incumbent - self._prune_margin(incumbent):
                    heapq.heappush(heap, (res.fun, next(counter), lo, up, res.x))

        if incumbent_x is None:
            return SolveOutcome(status=INFEASIBLE, message="no integer point found",
                                stats={"nodes": float(nodes)})
        return SolveOutcome(
            status=OPTIMAL,
            objective=sign * float(incumbent) + model.objective_constant,
            primal=np.asarray(incumbent_x, dtype=float),
            stats={"nodes": float(nodes), "mip_gap": 0.0},
            message="branch-and-bound finished",
        )

    def _prune_margin(self, incumbent):
        if not np.isfinite(incumbent):
            return 0.0
        return self.settings.mip_rel_gap * max(1.0, abs(incumbent))

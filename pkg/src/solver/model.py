# -*- coding: utf-8 -*-
"""
Solver-neutral linear model.

Models are assembled with a ``ModelBuilder`` and frozen into a
``LinearModel`` that any backend can solve.  Variables and constraints
are addressed by name, so model dumps are diffable between runs.

Naming scheme used by the planner's models::

    w_f_<branch>  w_g_<gen>              defense binaries (master)
    v_f_<branch>  v_g_<gen>              attack binaries (subproblem)
    zd_up_<load>  zd_dn_<load>           load factors
    zw_up_<farm>  zw_dn_<farm>           wind factors
    pg_<gen>  pw_<farm>  pf_<branch>  delta_<bus>  shed_<load>
                                         dispatch block (suffix _s<m> in master)
    lam_<bus>  mu_<branch>  th_lo_/th_up_<branch>  gam_<gen>  beta_<farm>  alpha_<load>
                                         dispatch duals (subproblem)

Sign convention for duals (the scipy/HiGHS marginal convention): a dual
is the derivative of the optimal objective with respect to the row's
right-hand side, or the bound's value.  For a minimization, duals of
``<=`` rows are <= 0, of ``>=`` rows >= 0, equality duals are free;
lower-bound duals are >= 0 and upper-bound duals <= 0.  Strong duality
then reads::

    objective = constant + sum(row_dual * rhs)
                + sum(lower_dual * lb) + sum(upper_dual * ub)   (finite bounds)
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from src.core.exceptions import ModelLintError

log = logging.getLogger(__name__)

CONTINUOUS, BINARY = "continuous", "binary"
LE, EQ, GE = "<=", "=", ">="
MINIMIZE, MAXIMIZE = "min", "max"

OPTIMAL, INFEASIBLE, UNBOUNDED, ERROR = "optimal", "infeasible", "unbounded", "error"

# Largest allowed ratio between the biggest and smallest nonzero coefficient
MAX_COEFFICIENT_RATIO = 1e6


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: Tuple[Tuple[int, float], ...]
    sense: str
    rhs: float


@dataclass(frozen=True)
class LinearModel:
    name: str
    variables: Tuple[Variable, ...]
    constraints: Tuple[Constraint, ...]
    objective: Tuple[Tuple[int, float], ...]
    sense: str = MINIMIZE
    objective_constant: float = 0.0

    @property
    def n_vars(self):
        return len(self.variables)

    @property
    def n_rows(self):
        return len(self.constraints)

    def has_integers(self):
        return any(v.kind == BINARY for v in self.variables)

    def index_of(self, name):
        try:
            return self._name_index[name]
        except KeyError:
            raise KeyError("model %s has no variable %r" % (self.name, name))

    @property
    def _name_index(self):
        cached = self.__dict__.get("_names")
        if cached is None:
            cached = {v.name: i for i, v in enumerate(self.variables)}
            object.__setattr__(self, "_names", cached)
        return cached

    def counts(self):
        n_bin = sum(1 for v in self.variables if v.kind == BINARY)
        return {"variables": self.n_vars, "binaries": n_bin, "constraints": self.n_rows}

    # ---------------------------------------------------------------
    # Array form
    # ---------------------------------------------------------------

    def objective_vector(self):
        c = np.zeros(self.n_vars)
        for idx, coef in self.objective:
            c[idx] += coef
        return c

    def constraint_matrix(self):
        rows, cols, vals = [], [], []
        for r, con in enumerate(self.constraints):
            for idx, coef in con.terms:
                rows.append(r)
                cols.append(idx)
                vals.append(coef)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_rows, self.n_vars))

    def bounds(self):
        lower = np.array([v.lower for v in self.variables], dtype=float)
        upper = np.array([v.upper for v in self.variables], dtype=float)
        return lower, upper

    def rhs(self):
        return np.array([con.rhs for con in self.constraints], dtype=float)

    def senses(self):
        return [con.sense for con in self.constraints]

    def integrality(self):
        return np.array([1 if v.kind == BINARY else 0 for v in self.variables], dtype=int)

    # ---------------------------------------------------------------
    # Debug text
    # ---------------------------------------------------------------

    def dump(self):
        """One line per constraint: ``name: +coef*var ... sense rhs``."""
        out = io.StringIO()
        out.write("\\ model %s\n" % self.name)
        out.write("%s: %s\n" % ("minimize" if self.sense == MINIMIZE else "maximize",
                                self._format_terms(self.objective) or "0"))
        out.write("subject to\n")
        for con in self.constraints:
            out.write("%s: %s %s %r\n" % (con.name, self._format_terms(con.terms) or "0",
                                          con.sense, con.rhs))
        out.write("bounds\n")
        for var in self.variables:
            out.write("%r <= %s <= %r%s\n" % (var.lower, var.name, var.upper,
                                               " binary" if var.kind == BINARY else ""))
        return out.getvalue()

    def _format_terms(self, terms):
        return " ".join("%+r*%s" % (coef, self.variables[idx].name) for idx, coef in terms)


class ModelBuilder(object):
    """Incremental construction of a ``LinearModel``."""

    def __init__(self, name):
        self.name = name
        self._variables = []
        self._index = {}
        self._constraints = []
        self._objective = {}
        self._sense = MINIMIZE
        self._constant = 0.0

    def add_variable(self, name, kind=CONTINUOUS, lower=0.0, upper=math.inf):
        if name in self._index:
            raise ModelLintError("model %s: duplicate variable %r" % (self.name, name))
        if kind == BINARY:
            lower, upper = max(0.0, lower), min(1.0, upper)
        self._index[name] = len(self._variables)
        self._variables.append(Variable(name, kind, float(lower), float(upper)))
        return name

    def add_constraint(self, name, terms, sense, rhs):
        """*terms* maps variable names to coefficients (dict or pairs);
        repeated names are summed, zero coefficients dropped."""
        if sense not in (LE, EQ, GE):
            raise ModelLintError("model %s: bad sense %r in %s" % (self.name, sense, name))
        merged = {}
        pairs = terms.items() if isinstance(terms, dict) else terms
        for var_name, coef in pairs:
            try:
                idx = self._index[var_name]
            except KeyError:
                raise ModelLintError("model %s: constraint %s references undeclared variable %r" % (
                    self.name, name, var_name))
            merged[idx] = merged.get(idx, 0.0) + float(coef)
        row = tuple((idx, coef) for idx, coef in sorted(merged.items()) if coef != 0.0)
        self._constraints.append(Constraint(name, row, sense, float(rhs)))

    def set_objective(self, terms, sense=MINIMIZE, constant=0.0):
        self._objective = {}
        self._sense = sense
        self._constant = float(constant)
        pairs = terms.items() if isinstance(terms, dict) else terms
        for var_name, coef in pairs:
            idx = self._index[var_name]
            self._objective[idx] = self._objective.get(idx, 0.0) + float(coef)

    def build(self):
        model = LinearModel(
            name=self.name,
            variables=tuple(self._variables),
            constraints=tuple(self._constraints),
            objective=tuple((i, c) for i, c in sorted(self._objective.items()) if c != 0.0),
            sense=self._sense,
            objective_constant=self._constant,
        )
        lint(model)
        return model


def lint(model, max_ratio=MAX_COEFFICIENT_RATIO):
    """Structural checks every model must pass before it is solved."""
    for var in model.variables:
        if var.lower > var.upper:
            raise ModelLintError("model %s: variable %s has lower %r > upper %r" % (
                model.name, var.name, var.lower, var.upper))
        if var.kind == BINARY and not (var.lower in (0.0, 1.0) and var.upper in (0.0, 1.0)):
            raise ModelLintError("model %s: binary %s must have 0/1 bounds" % (model.name, var.name))
    magnitudes = [abs(c) for con in model.constraints for _, c in con.terms]
    magnitudes.extend(abs(c) for _, c in model.objective)
    if magnitudes:
        ratio = max(magnitudes) / min(magnitudes)
        if ratio >= max_ratio:
            raise ModelLintError("model %s: coefficient spread %.3g exceeds %.3g" % (
                model.name, ratio, max_ratio))


# ---------------------------------------------------------------------------
# Solve outcome
# ---------------------------------------------------------------------------

@dataclass
class SolveOutcome:
    status: str
    objective: Optional[float] = None
    primal: Optional[np.ndarray] = None
    row_duals: Optional[np.ndarray] = None
    lower_duals: Optional[np.ndarray] = None
    upper_duals: Optional[np.ndarray] = None
    stats: Dict[str, float] = field(default_factory=dict)
    message: str = ""

    @property
    def is_optimal(self):
        return self.status == OPTIMAL

    def value(self, model, name):
        return float(self.primal[model.index_of(name)])

    def row_dual(self, model, name):
        for r, con in enumerate(model.constraints):
            if con.name == name:
                return float(self.row_duals[r])
        raise KeyError("model %s has no constraint %r" % (model.name, name))


def dual_objective(model, outcome):
    """Objective rebuilt from duals; equals the primal optimum for LPs."""
    lower, upper = model.bounds()
    total = model.objective_constant + float(np.dot(outcome.row_duals, model.rhs()))
    finite_lo = np.isfinite(lower)
    finite_up = np.isfinite(upper)
    total += float(np.dot(outcome.lower_duals[finite_lo], lower[finite_lo]))
    total += float(np.dot(outcome.upper_duals[finite_up], upper[finite_up]))
    return total


def max_violation(model, x):
    """Largest bound or row violation of point *x*."""
    lower, upper = model.bounds()
    worst = float(max(np.max(lower - x, initial=0.0), np.max(x - upper, initial=0.0)))
    if model.n_rows:
        activity = model.constraint_matrix().dot(x)
        for act, con in zip(activity, model.constraints):
            if con.sense == LE:
                worst = max(worst, act - con.rhs)
            elif con.sense == GE:
                worst = max(worst, con.rhs - act)
            else:
                worst = max(worst, abs(act - con.rhs))
    return worst

# -*- coding: utf-8 -*-
"""
Solver backend interface, registry and pool.

A backend solves frozen ``LinearModel`` objects.  It is used by one
solve at a time; concurrent callers take instances from a
``BackendPool``.
"""
from __future__ import annotations

import abc
import contextlib
import logging
import queue
import time
from dataclasses import dataclass

import numpy as np

from src.core.config_loader import load_defense_config
from src.core.exceptions import BackendFailure, ConsistencyError, SolverError
from src.solver.model import OPTIMAL, dual_objective, max_violation

log = logging.getLogger(__name__)

# Relative MIP gap every planner MILP must close.
REQUIRED_MIP_GAP = 1e-9

BINARY_ROUNDING_TOL = 1e-6


@dataclass(frozen=True)
class BackendSettings:
    mip_rel_gap: float = REQUIRED_MIP_GAP
    time_limit_s: float = 3600.0
    feasibility_tol: float = 1e-6
    debug_duality_check: bool = False
    node_limit: int = 200000

    @classmethod
    def from_config(cls, config):
        return cls(
            mip_rel_gap=config.get_float("solver", "mip_rel_gap", REQUIRED_MIP_GAP),
            time_limit_s=config.get_float("solver", "time_limit_s", 3600.0),
            feasibility_tol=config.get_float("solver", "feasibility_tol", 1e-6),
            debug_duality_check=config.get_bool("solver", "debug_duality_check", False),
        )


class SolverBackend(abc.ABC):
    """Base class for LP/MILP engines."""

    name = "abstract"

    def __init__(self, settings=None):
        self.settings = settings or BackendSettings()
        if self.settings.mip_rel_gap > REQUIRED_MIP_GAP:
            raise SolverError("mip_rel_gap %.3g is looser than the required %.0e" % (
                self.settings.mip_rel_gap, REQUIRED_MIP_GAP))

    def solve_lp(self, model):
        if model.has_integers():
            raise SolverError("solve_lp called on model %s with binaries" % model.name)
        started = time.perf_counter()
        outcome = self._solve_lp(model)
        outcome.stats.setdefault("time_s", time.perf_counter() - started)
        if outcome.is_optimal:
            self._check_feasible(model, outcome)
            if self.settings.debug_duality_check:
                self.check_strong_duality(model, outcome)
        log.debug("%s LP %s: %s obj=%s (%d vars, %d rows, %.4fs)", self.name, model.name,
                  outcome.status, outcome.objective, model.n_vars, model.n_rows,
                  outcome.stats["time_s"])
        return outcome

    def solve_milp(self, model):
        started = time.perf_counter()
        outcome = self._solve_milp(model)
        outcome.stats.setdefault("time_s", time.perf_counter() - started)
        if outcome.is_optimal:
            self._round_binaries(model, outcome)
            self._check_feasible(model, outcome)
        log.debug("%s MILP %s: %s obj=%s (%s, %.4fs)", self.name, model.name, outcome.status,
                  outcome.objective, model.counts(), outcome.stats["time_s"])
        return outcome

    @abc.abstractmethod
    def _solve_lp(self, model):
        """Return a ``SolveOutcome`` with duals."""

    @abc.abstractmethod
    def _solve_milp(self, model):
        """Return a ``SolveOutcome``; duals are not reported."""

    # ---------------------------------------------------------------
    # Outcome checks
    # ---------------------------------------------------------------

    def _round_binaries(self, model, outcome):
        integral = model.integrality().astype(bool)
        if not integral.any():
            return
        values = outcome.primal[integral]
        rounded = np.round(values)
        worst = float(np.max(np.abs(values - rounded)))
        if worst > BINARY_ROUNDING_TOL:
            raise BackendFailure("model %s: binary off by %.3g after solve" % (model.name, worst),
                                 status="fractional")
        outcome.primal[integral] = rounded

    def _check_feasible(self, model, outcome):
        # Scaled by the largest coefficient so big-M rows do not trip it.
        scale = max([1.0] + [abs(c) for con in model.constraints for _, c in con.terms])
        worst = max_violation(model, outcome.primal)
        if worst > self.settings.feasibility_tol * scale:
            raise BackendFailure("model %s: optimal point violates constraints by %.3g" % (
                model.name, worst), status="infeasible-point")

    def check_strong_duality(self, model, outcome, tol=1e-6):
        rebuilt = dual_objective(model, outcome)
        if abs(rebuilt - outcome.objective) > tol * max(1.0, abs(outcome.objective)):
            raise ConsistencyError("model %s: dual objective %.9g != primal %.9g" % (
                model.name, rebuilt, outcome.objective))

    @staticmethod
    def require_optimal(model, outcome):
        if outcome.status != OPTIMAL:
            raise BackendFailure("model %s ended with status %s: %s" % (
                model.name, outcome.status, outcome.message), status=outcome.status)
        return outcome


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_REGISTRY = {}


def register_backend(cls):
    _REGISTRY[cls.name] = cls
    return cls


def available_backends():
    _ensure_builtin()
    return sorted(_REGISTRY)


def _ensure_builtin():
    # Importing registers the built-in backends.
    from src.solver import bnb_backend, highs_backend  # noqa: F401


def get_backend(name=None, config=None, settings=None):
    """Instantiate a backend by name.  With no name, the environment
    variable and then ``[solver] backend`` decide."""
    _ensure_builtin()
    config = config or load_defense_config()
    name = (name or config.backend_name()).strip().lower()
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise SolverError("unknown solver backend %r (available: %s)" % (
            name, ", ".join(sorted(_REGISTRY))))
    return cls(settings or BackendSettings.from_config(config))


class BackendPool(object):
    """Hands out backend instances, one per concurrent solve."""

    def __init__(self, name=None, size=1, config=None):
        self._instances = queue.Queue()
        for _ in range(max(1, size)):
            self._instances.put(get_backend(name, config))

    @contextlib.contextmanager
    def acquire(self, timeout=None):
        backend = self._instances.get(timeout=timeout)
        try:
            yield backend
        finally:
            self._instances.put(backend)

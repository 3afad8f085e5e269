# -*- coding: utf-8 -*-
"""
Budget uncertainty sets for load demand and available wind.

Nature moves each load (and each wind farm) up or down from its expected
value by a factor of its deviation.  Factors live in [0, 1], an up/down
pair sums to at most one, and each family has a total budget.  Only the
vertices of these sets (all factors 0 or 1) are needed by the
optimizer; the continuous set is kept for validating realizations that
arrive from outside.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.exceptions import DimensionMismatchError, EnumerationLimitError, FactorDomainError
from src.core.itertools_helpers import DOWN, UP, count_signed_subsets, signed_subsets

log = logging.getLogger(__name__)

DEFAULT_REALIZATION_CAP = 10 ** 7

FACTOR_TOL = 1e-9


def _check_pair(z_up, z_down, label="factor pair"):
    if not (-FACTOR_TOL <= z_up <= 1 + FACTOR_TOL and -FACTOR_TOL <= z_down <= 1 + FACTOR_TOL):
        raise FactorDomainError("%s: factors must lie in [0, 1] (got up=%r, down=%r)" % (
            label, z_up, z_down))
    if z_up + z_down > 1 + FACTOR_TOL:
        raise FactorDomainError("%s: up + down must not exceed 1 (got %r)" % (label, z_up + z_down))


def realize_load(load, z_up, z_down):
    """Realized demand (MW) of *load* under factors ``(z_up, z_down)``."""
    _check_pair(z_up, z_down, "load %s" % load.id)
    return load.expected_mw + load.dev_up_mw * z_up - load.dev_down_mw * z_down


def realize_wind(farm, z_up, z_down):
    """Realized available wind (MW) of *farm* under ``(z_up, z_down)``."""
    _check_pair(z_up, z_down, "wind farm %s" % farm.id)
    return farm.expected_mw + farm.dev_up_mw * z_up - farm.dev_down_mw * z_down


# ---------------------------------------------------------------------------
# Realization value object
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UncertaintyRealization:
    load_z_up: Tuple[float, ...]
    load_z_down: Tuple[float, ...]
    wind_z_up: Tuple[float, ...] = ()
    wind_z_down: Tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("load_z_up", "load_z_down", "wind_z_up", "wind_z_down"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @classmethod
    def nominal(cls, case):
        n_loads, n_farms = len(case.loads), len(case.wind_farms)
        return cls((0.0,) * n_loads, (0.0,) * n_loads, (0.0,) * n_farms, (0.0,) * n_farms)

    @classmethod
    def from_moves(cls, case, load_moves=(), wind_moves=()):
        """Binary realization from ``(position, direction)`` pairs."""
        up = [0.0] * len(case.loads)
        down = [0.0] * len(case.loads)
        for pos, direction in load_moves:
            (up if direction == UP else down)[pos] = 1.0
        w_up = [0.0] * len(case.wind_farms)
        w_down = [0.0] * len(case.wind_farms)
        for pos, direction in wind_moves:
            (w_up if direction == UP else w_down)[pos] = 1.0
        return cls(tuple(up), tuple(down), tuple(w_up), tuple(w_down))

    @classmethod
    def from_sparse(cls, case, load_entries=(), wind_entries=()):
        """Inverse of ``to_sparse``: entries carry case ids, not positions."""
        load_pos = {load.id: pos for pos, load in enumerate(case.loads)}
        farm_pos = {farm.id: pos for pos, farm in enumerate(case.wind_farms)}
        try:
            load_moves = [(load_pos[e["load_id"]], e["direction"]) for e in load_entries]
            wind_moves = [(farm_pos[e["farm_id"]], e["direction"]) for e in wind_entries]
        except KeyError as e:
            raise DimensionMismatchError("realization references unknown id %s" % e)
        return cls.from_moves(case, load_moves, wind_moves)

    def dimensions(self):
        return len(self.load_z_up), len(self.wind_z_up)

    def is_binary(self, tol=1e-6):
        return all(min(abs(v), abs(v - 1.0)) <= tol for v in self.all_factors())

    def all_factors(self):
        return self.load_z_up + self.load_z_down + self.wind_z_up + self.wind_z_down

    def signature(self):
        """Binary signature; only meaningful for vertex realizations."""
        return "".join("1" if v > 0.5 else "0" for v in self.all_factors())

    def to_sparse(self, case):
        """``([{load_id, direction}], [{farm_id, direction}])`` for
        every factor at 1."""
        loads = []
        for pos, load in enumerate(case.loads):
            if self.load_z_up[pos] > 0.5:
                loads.append({"load_id": load.id, "direction": UP})
            elif self.load_z_down[pos] > 0.5:
                loads.append({"load_id": load.id, "direction": DOWN})
        farms = []
        for pos, farm in enumerate(case.wind_farms):
            if self.wind_z_up[pos] > 0.5:
                farms.append({"farm_id": farm.id, "direction": UP})
            elif self.wind_z_down[pos] > 0.5:
                farms.append({"farm_id": farm.id, "direction": DOWN})
        return loads, farms

    def realized_loads(self, case):
        """Realized demand per load point, MW, case order."""
        self.require_dimensions(case)
        return np.array([realize_load(load, self.load_z_up[i], self.load_z_down[i])
                         for i, load in enumerate(case.loads)])

    def realized_wind(self, case):
        """Realized available wind per farm, MW, case order."""
        self.require_dimensions(case)
        return np.array([realize_wind(farm, self.wind_z_up[k], self.wind_z_down[k])
                         for k, farm in enumerate(case.wind_farms)])

    def require_dimensions(self, case):
        if (len(self.load_z_up) != len(case.loads) or len(self.load_z_down) != len(case.loads)
                or len(self.wind_z_up) != len(case.wind_farms)
                or len(self.wind_z_down) != len(case.wind_farms)):
            raise DimensionMismatchError(
                "realization has %d/%d load and %d/%d wind factors; case has %d loads, %d farms" % (
                    len(self.load_z_up), len(self.load_z_down), len(self.wind_z_up),
                    len(self.wind_z_down), len(case.loads), len(case.wind_farms)))


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------

def check_budget(realization, budgets, case=None):
    """Every violated uncertainty-set constraint; empty means feasible."""
    r = realization
    if len(r.load_z_up) != len(r.load_z_down) or len(r.wind_z_up) != len(r.wind_z_down):
        raise DimensionMismatchError("up and down factor vectors differ in length")
    if case is not None:
        r.require_dimensions(case)

    violations = []
    for family, ups, downs, budget in (
            ("load", r.load_z_up, r.load_z_down, budgets.load_uncertainty_budget),
            ("wind", r.wind_z_up, r.wind_z_down, budgets.wind_uncertainty_budget)):
        for pos, (z_up, z_down) in enumerate(zip(ups, downs)):
            for direction, z in ((UP, z_up), (DOWN, z_down)):
                if not -FACTOR_TOL <= z <= 1 + FACTOR_TOL:
                    violations.append("%s %d: %s factor %r outside [0, 1]" % (
                        family, pos, direction, z))
            if z_up + z_down > 1 + FACTOR_TOL:
                violations.append("%s %d: up + down = %r exceeds 1" % (family, pos, z_up + z_down))
        total = sum(ups) + sum(downs)
        if total > budget + FACTOR_TOL:
            violations.append("%s budget: %r > %r" % (family, total, budget))
    return violations


# ---------------------------------------------------------------------------
# Vertex enumeration
# ---------------------------------------------------------------------------

def count_extreme_realizations(case):
    b = case.budgets
    return (count_signed_subsets(len(case.loads), int(b.load_uncertainty_budget))
            * count_signed_subsets(len(case.wind_farms), int(b.wind_uncertainty_budget)))


def enumerate_extreme_realizations(case, cap=DEFAULT_REALIZATION_CAP):
    """Yield every binary realization of the case's uncertainty sets.

    Loads and wind farms form one index sequence, loads first.  Nominal
    comes first, then by total number of active factors, then
    lexicographic over that sequence with up before down.  Fractional
    budgets act as their floor.
    """
    count = count_extreme_realizations(case)
    if cap is not None and count > cap:
        raise EnumerationLimitError("extreme realizations", count, cap)
    log.debug("Enumerating %d extreme realizations", count)

    u_load = min(len(case.loads), int(case.budgets.load_uncertainty_budget))
    u_wind = min(len(case.wind_farms), int(case.budgets.wind_uncertainty_budget))
    n_load = len(case.loads)

    def within_budgets(combo):
        loads = sum(1 for i in combo if i < n_load)
        return loads <= u_load and len(combo) - loads <= u_wind

    for moves in signed_subsets(n_load + len(case.wind_farms), u_load + u_wind, within_budgets):
        load_moves = [(i, d) for i, d in moves if i < n_load]
        wind_moves = [(i - n_load, d) for i, d in moves if i >= n_load]
        yield UncertaintyRealization.from_moves(case, load_moves, wind_moves)

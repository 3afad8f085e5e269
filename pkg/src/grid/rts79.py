# -*- coding: utf-8 -*-
"""
IEEE RTS-79 (24-bus) study case with wind farms.

Topology and branch data are the public RTS-79 tables (reactance column,
continuous rating A).  Loads follow the standard RTS-79 peak-load bus
distribution (2850 MW total).  The 32 conventional units keep the usual
bus order; units 3, 14 and 31 are removed and the remaining 29 are
renumbered 1..29 in that order.  Three wind farms are added at buses 1,
13 and 23.
"""
from __future__ import annotations

from src.grid.case import Branch, Budgets, Bus, Generator, GridCase, LoadPoint, WindFarm

BASE_MVA = 100.0

# (id, from, to, reactance p.u., rating MW)
BRANCH_TABLE = (
    (1, 1, 2, 0.0139, 175.0),
    (2, 1, 3, 0.2112, 175.0),
    (3, 1, 5, 0.0845, 175.0),
    (4, 2, 4, 0.1267, 175.0),
    (5, 2, 6, 0.1920, 175.0),
    (6, 3, 9, 0.1190, 175.0),
    (7, 3, 24, 0.0839, 400.0),
    (8, 4, 9, 0.1037, 175.0),
    (9, 5, 10, 0.0883, 175.0),
    (10, 6, 10, 0.0605, 175.0),
    (11, 7, 8, 0.0614, 175.0),
    (12, 8, 9, 0.1651, 175.0),
    (13, 8, 10, 0.1651, 175.0),
    (14, 9, 11, 0.0839, 400.0),
    (15, 9, 12, 0.0839, 400.0),
    (16, 10, 11, 0.0839, 400.0),
    (17, 10, 12, 0.0839, 400.0),
    (18, 11, 13, 0.0476, 500.0),
    (19, 11, 14, 0.0418, 500.0),
    (20, 12, 13, 0.0476, 500.0),
    (21, 12, 23, 0.0966, 500.0),
    (22, 13, 23, 0.0865, 500.0),
    (23, 14, 16, 0.0389, 500.0),
    (24, 15, 16, 0.0173, 500.0),
    (25, 15, 21, 0.0490, 500.0),
    (26, 15, 21, 0.0490, 500.0),
    (27, 15, 24, 0.0519, 500.0),
    (28, 16, 17, 0.0259, 500.0),
    (29, 16, 19, 0.0231, 500.0),
    (30, 17, 18, 0.0144, 500.0),
    (31, 17, 22, 0.1053, 500.0),
    (32, 18, 21, 0.0130, 500.0),
    (33, 18, 21, 0.0130, 500.0),
    (34, 19, 20, 0.0198, 500.0),
    (35, 19, 20, 0.0198, 500.0),
    (36, 20, 23, 0.0108, 500.0),
    (37, 20, 23, 0.0108, 500.0),
    (38, 21, 22, 0.0678, 500.0),
)

# Original unit list: (bus, capacity MW), units numbered 1..32 in this order.
UNIT_TABLE = (
    (1, 20.0), (1, 20.0), (1, 76.0), (1, 76.0),
    (2, 20.0), (2, 20.0), (2, 76.0), (2, 76.0),
    (7, 100.0), (7, 100.0), (7, 100.0),
    (13, 197.0), (13, 197.0), (13, 197.0),
    (15, 12.0), (15, 12.0), (15, 12.0), (15, 12.0), (15, 12.0), (15, 155.0),
    (16, 155.0),
    (18, 400.0),
    (21, 400.0),
    (22, 50.0), (22, 50.0), (22, 50.0), (22, 50.0), (22, 50.0), (22, 50.0),
    (23, 155.0), (23, 155.0), (23, 350.0),
)

REMOVED_UNITS = (3, 14, 31)

# (bus, peak load MW)
LOAD_TABLE = (
    (1, 108.0), (2, 97.0), (3, 180.0), (4, 74.0), (5, 71.0), (6, 136.0),
    (7, 125.0), (8, 171.0), (9, 175.0), (10, 195.0), (13, 265.0), (14, 194.0),
    (15, 317.0), (16, 100.0), (18, 333.0), (19, 181.0), (20, 128.0),
)

# (bus, expected MW, deviation MW); deviations are 20% of expected.
WIND_TABLE = (
    (1, 160.0, 32.0),
    (13, 150.0, 30.0),
    (23, 120.0, 24.0),
)

LOAD_DEVIATION_MW = 30.0

DEFAULT_BUDGETS = Budgets(defense_budget=3.0, attack_budget=3.0,
                          load_uncertainty_budget=5.0, wind_uncertainty_budget=3.0)


def make_modified_rts79(budgets=None, load_deviation_mw=LOAD_DEVIATION_MW):
    """Build the modified RTS-79 study case."""
    buses = tuple(Bus(id=n) for n in range(1, 25))
    branches = tuple(Branch(id=i, from_bus=f, to_bus=t, reactance_x=x, flow_limit=rate)
                     for i, f, t, x, rate in BRANCH_TABLE)

    kept = [unit for number, unit in enumerate(UNIT_TABLE, start=1)
            if number not in REMOVED_UNITS]
    generators = tuple(Generator(id=j, bus=bus, p_max=cap)
                       for j, (bus, cap) in enumerate(kept, start=1))

    wind_farms = tuple(WindFarm(id=k, bus=bus, expected_mw=mw, dev_up_mw=dev, dev_down_mw=dev)
                       for k, (bus, mw, dev) in enumerate(WIND_TABLE, start=1))
    loads = tuple(LoadPoint(id=i, bus=bus, expected_mw=mw,
                            dev_up_mw=float(load_deviation_mw), dev_down_mw=float(load_deviation_mw))
                  for i, (bus, mw) in enumerate(LOAD_TABLE, start=1))

    return GridCase(buses=buses, branches=branches, generators=generators,
                    wind_farms=wind_farms, loads=loads,
                    budgets=budgets if budgets is not None else DEFAULT_BUDGETS,
                    base_mva=BASE_MVA)

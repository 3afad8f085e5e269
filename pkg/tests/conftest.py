# -*- coding: utf-8 -*-
"""
Shared fixtures and case factories for the planner test suite.
"""
from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir))

from src.core.config_loader import reset_defense_config
from src.grid.case import Branch, Budgets, Bus, Generator, GridCase, LoadPoint, WindFarm

REPO_ROOT = os.path.normpath(os.path.join(os.path.dirname(__file__), os.pardir))
CASES_DIR = os.path.join(REPO_ROOT, "data", "cases")
REFERENCE_DIR = os.path.join(REPO_ROOT, "data", "reference")

MW_TOL = 1e-5


def make_single_bus_case(p_max=100.0, load_mw=80.0, load_dev=0.0, budgets=None):
    """One bus, one generator, one load, no branches."""
    return GridCase(
        buses=(Bus(1),),
        generators=(Generator(id=1, bus=1, p_max=p_max),),
        loads=(LoadPoint(id=1, bus=1, expected_mw=load_mw, dev_up_mw=load_dev,
                         dev_down_mw=load_dev),),
        budgets=budgets or Budgets(),
    )


def make_three_bus_case(budgets=None):
    """Generator at bus 1, load at bus 2, wind at bus 3, meshed triangle."""
    return GridCase(
        buses=(Bus(1), Bus(2), Bus(3)),
        branches=(Branch(1, 1, 2, 0.1, 100.0), Branch(2, 2, 3, 0.1, 50.0),
                  Branch(3, 1, 3, 0.1, 50.0)),
        generators=(Generator(id=1, bus=1, p_max=100.0),),
        wind_farms=(WindFarm(id=1, bus=3, expected_mw=30.0, dev_up_mw=10.0, dev_down_mw=10.0),),
        loads=(LoadPoint(id=1, bus=2, expected_mw=80.0, dev_up_mw=20.0, dev_down_mw=20.0),),
        budgets=budgets or Budgets(1.0, 1.0, 1.0, 1.0),
    )


def make_radial_case(budgets=None):
    """Four buses in a line, generation at both ends, loads in the middle."""
    return GridCase(
        buses=tuple(Bus(n) for n in range(1, 5)),
        branches=(Branch(1, 1, 2, 0.05, 120.0), Branch(2, 2, 3, 0.08, 60.0),
                  Branch(3, 3, 4, 0.05, 120.0)),
        generators=(Generator(1, 1, 90.0), Generator(2, 4, 70.0)),
        loads=(LoadPoint(1, 2, 60.0, 10.0, 10.0), LoadPoint(2, 3, 50.0, 10.0, 10.0)),
        budgets=budgets or Budgets(1.0, 1.0, 1.0, 0.0),
    )


def make_stiff_loop_case(budgets=None):
    """Triangle with one very stiff branch and one 0.5 MW branch: loop
    flow caps the bus-1 generator at 75.5 MW once the bus-3 unit is lost."""
    return GridCase(
        buses=(Bus(1), Bus(2), Bus(3)),
        branches=(Branch(1, 1, 2, 0.01, 1000.0), Branch(2, 1, 3, 0.5, 0.5),
                  Branch(3, 3, 2, 1.0, 1000.0)),
        generators=(Generator(1, 1, 500.0), Generator(2, 3, 5.0)),
        loads=(LoadPoint(1, 2, 150.0),),
        budgets=budgets or Budgets(0.0, 1.0, 0.0, 0.0),
    )


def make_two_bus_case(budgets=None):
    """Two buses, one branch; serving the load needs a 7 rad angle spread."""
    return GridCase(
        buses=(Bus(1), Bus(2)),
        branches=(Branch(1, 1, 2, 1.0, 1000.0),),
        generators=(Generator(1, 1, 800.0),),
        loads=(LoadPoint(1, 2, 700.0),),
        budgets=budgets or Budgets(),
    )


@pytest.fixture
def single_bus_case():
    return make_single_bus_case()


@pytest.fixture
def three_bus_case():
    return make_three_bus_case()


@pytest.fixture
def radial_case():
    return make_radial_case()


@pytest.fixture
def backend():
    from src.solver.highs_backend import HighsBackend
    return HighsBackend()


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch):
    """Every test starts from built-in defaults and the default backend."""
    monkeypatch.delenv("GRID_DEFENSE_BACKEND", raising=False)
    reset_defense_config()
    yield
    reset_defense_config()

# -*- coding: utf-8 -*-
"""
Tests for src/grid/case.py: validation, lookups, overrides and the
incidence matrix.
"""
from __future__ import annotations

import numpy as np
import pytest

from src.core.exceptions import CaseValidationError
from src.grid.case import (
    Branch,
    Budgets,
    Bus,
    Generator,
    GridCase,
    LoadPoint,
    WindFarm,
    incidence,
    susceptances_pu,
)

from tests.conftest import make_three_bus_case


# ============================================================================
# Validation
# ============================================================================


class TestValidation:

    def test_valid_case_builds(self, three_bus_case):
        assert len(three_bus_case.buses) == 3
        assert three_bus_case.element_count() == 4

    def test_reports_every_violation(self):
        with pytest.raises(CaseValidationError) as info:
            GridCase(
                buses=(Bus(1), Bus(2)),
                branches=(Branch(1, 1, 2, -0.1, 50.0), Branch(2, 1, 9, 0.1, 50.0)),
                generators=(Generator(1, 1, -5.0),),
                loads=(LoadPoint(1, 2, 10.0, 0.0, 20.0),),
            )
        text = "\n".join(info.value.violations)
        assert len(info.value.violations) == 4
        assert "reactance_x" in text
        assert "unknown bus 9" in text
        assert "p_max" in text
        assert "dev_down_mw" in text

    def test_duplicate_ids(self):
        with pytest.raises(CaseValidationError, match="bus id 1 is not unique"):
            GridCase(buses=(Bus(1), Bus(1)))

    def test_self_loop(self):
        with pytest.raises(CaseValidationError, match="from_bus and to_bus"):
            GridCase(buses=(Bus(1),), branches=(Branch(1, 1, 1, 0.1, 10.0),))

    def test_negative_budget(self):
        with pytest.raises(CaseValidationError, match="attack_budget"):
            GridCase(buses=(Bus(1),), budgets=Budgets(attack_budget=-1.0))

    def test_non_positive_costs(self):
        with pytest.raises(CaseValidationError, match="defense_cost"):
            GridCase(buses=(Bus(1), Bus(2)),
                     branches=(Branch(1, 1, 2, 0.1, 10.0, defense_cost=0.0),))

    def test_wind_down_deviation_bounded_by_expected(self):
        with pytest.raises(CaseValidationError, match="wind farm 1"):
            GridCase(buses=(Bus(1),), wind_farms=(WindFarm(1, 1, 10.0, 0.0, 12.0),))

    def test_empty_bus_list(self):
        with pytest.raises(CaseValidationError, match="at least one bus"):
            GridCase(buses=())

    def test_lists_become_tuples(self):
        case = GridCase(buses=[Bus(1)], generators=[Generator(1, 1, 10.0)])
        assert isinstance(case.buses, tuple)
        assert isinstance(case.generators, tuple)


# ============================================================================
# Lookups and aggregates
# ============================================================================


class TestLookups:

    def test_reference_bus_is_lowest_id(self):
        case = GridCase(buses=(Bus(7), Bus(3), Bus(5)))
        assert case.reference_bus == 3
        assert case.bus_position == {7: 0, 3: 1, 5: 2}

    def test_components_by_bus(self, three_bus_case):
        assert three_bus_case.generators_at == {1: [0]}
        assert three_bus_case.wind_at == {3: [0]}
        assert three_bus_case.loads_at == {2: [0]}
        assert three_bus_case.branches_at == {1: [0, 2], 2: [0, 1], 3: [1, 2]}

    def test_by_id(self, three_bus_case):
        assert three_bus_case.branch_by_id(2).flow_limit == 50.0
        assert three_bus_case.generator_by_id(1).p_max == 100.0
        with pytest.raises(KeyError):
            three_bus_case.branch_by_id(99)

    def test_totals(self, three_bus_case):
        assert three_bus_case.total_expected_load() == 80.0
        assert three_bus_case.total_capacity() == 100.0

    def test_per_unit(self, three_bus_case):
        assert three_bus_case.to_pu(50.0) == 0.5
        assert three_bus_case.to_mw(0.25) == 25.0


# ============================================================================
# Overrides
# ============================================================================


class TestOverrides:

    def test_with_budgets(self, three_bus_case):
        changed = three_bus_case.with_budgets(defense_budget=2.0)
        assert changed.budgets.defense_budget == 2.0
        assert changed.budgets.attack_budget == 1.0
        assert three_bus_case.budgets.defense_budget == 1.0

    def test_with_budgets_revalidates(self, three_bus_case):
        with pytest.raises(CaseValidationError):
            three_bus_case.with_budgets(load_uncertainty_budget=-2.0)

    def test_with_load_deviation(self, three_bus_case):
        changed = three_bus_case.with_load_deviation(5)
        assert changed.loads[0].dev_up_mw == 5.0
        assert changed.loads[0].dev_down_mw == 5.0

    def test_with_load_deviation_too_large(self, three_bus_case):
        with pytest.raises(CaseValidationError):
            three_bus_case.with_load_deviation(500.0)

    def test_with_wind_deviation(self, three_bus_case):
        changed = three_bus_case.with_wind_deviation(0.5)
        assert changed.wind_farms[0].dev_up_mw == 15.0
        assert changed.wind_farms[0].dev_down_mw == 15.0

    def test_equal_cases_compare_equal(self):
        assert make_three_bus_case() == make_three_bus_case()


# ============================================================================
# Network structure
# ============================================================================


class TestIncidence:

    def test_ring(self):
        case = GridCase(buses=(Bus(1), Bus(2), Bus(3)),
                        branches=(Branch(1, 1, 2, 0.1, 10.0), Branch(2, 2, 3, 0.1, 10.0),
                                  Branch(3, 1, 3, 0.1, 10.0)))
        matrix = incidence(case)
        assert matrix.shape == (3, 3)
        assert np.all(matrix.sum(axis=0) == 0)
        assert list(matrix[0]) == [1, 0, 1]
        assert list(matrix[1]) == [-1, 1, 0]

    def test_susceptances(self, three_bus_case):
        assert np.allclose(susceptances_pu(three_bus_case), [10.0, 10.0, 10.0])

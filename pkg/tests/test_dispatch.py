# -*- coding: utf-8 -*-
"""
Tests for src/optimization/dispatch.py: the operator's load-shedding LP.
"""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from src.core.itertools_helpers import DOWN, UP
from src.grid.uncertainty import UncertaintyRealization, enumerate_extreme_realizations
from src.optimization.dispatch import (
    build_dispatch_model,
    dispatch_dual_objective,
    solve_dispatch,
    solve_dispatch_values,
)
from src.optimization.plans import AttackPlan, DefensePlan

from tests.conftest import MW_TOL, make_radial_case, make_three_bus_case


def _nominal(case):
    return UncertaintyRealization.nominal(case)


# ============================================================================
# Known answers
# ============================================================================


class TestKnownAnswers:

    def test_single_bus_unattacked(self, single_bus_case, backend):
        case = single_bus_case
        result = solve_dispatch(case, DefensePlan.empty(case), AttackPlan.none(case),
                                _nominal(case), backend)
        assert result.total_shed == pytest.approx(0.0, abs=MW_TOL)
        assert result.gen_output == pytest.approx((80.0,))

    def test_single_bus_generator_lost(self, single_bus_case, backend):
        case = single_bus_case
        attack = AttackPlan.from_ids(case, generators=[1])
        result = solve_dispatch(case, DefensePlan.empty(case), attack, _nominal(case), backend)
        assert result.total_shed == pytest.approx(80.0)
        assert result.gen_in_service == (0,)

    def test_defense_cancels_attack(self, single_bus_case, backend):
        case = single_bus_case
        result = solve_dispatch(case, DefensePlan.from_ids(case, generators=[1]),
                                AttackPlan.from_ids(case, generators=[1]), _nominal(case), backend)
        assert result.total_shed == pytest.approx(0.0, abs=MW_TOL)

    def test_three_bus_nominal(self, three_bus_case, backend):
        case = three_bus_case
        result = solve_dispatch(case, DefensePlan.empty(case), AttackPlan.none(case),
                                _nominal(case), backend)
        assert result.total_shed == pytest.approx(0.0, abs=MW_TOL)
        assert sum(result.gen_output) + sum(result.wind_output) == pytest.approx(80.0)

    def test_three_bus_line_out_under_stress(self, three_bus_case, backend):
        case = three_bus_case
        stress = UncertaintyRealization.from_moves(case, [(0, UP)], [(0, DOWN)])
        attack = AttackPlan.from_ids(case, branches=[1])
        result = solve_dispatch(case, DefensePlan.empty(case), attack, stress, backend)
        assert result.realized_loads == (100.0,)
        assert result.realized_wind == (20.0,)
        assert result.total_shed == pytest.approx(50.0)
        assert result.flows[0] == 0.0
        assert abs(result.flows[1]) == pytest.approx(50.0)

    def test_three_bus_generator_out(self, three_bus_case, backend):
        case = three_bus_case
        attack = AttackPlan.from_ids(case, generators=[1])
        result = solve_dispatch(case, DefensePlan.empty(case), attack, _nominal(case), backend)
        assert result.total_shed == pytest.approx(50.0)

    def test_reference_angle_is_zero(self, three_bus_case, backend):
        case = three_bus_case
        result = solve_dispatch(case, DefensePlan.empty(case), AttackPlan.none(case),
                                _nominal(case), backend)
        assert result.angles[case.bus_position[case.reference_bus]] == 0.0


# ============================================================================
# Model shape
# ============================================================================


class TestModel:

    def test_destroyed_branch_has_no_flow_row(self, three_bus_case):
        model = build_dispatch_model(three_bus_case, (0, 1, 1), (1,), [80.0], [30.0])
        names = [con.name for con in model.constraints]
        assert "flow_1" not in names
        assert "flow_2" in names and "balance_2" in names
        pf = model.variables[model.index_of("pf_1")]
        assert (pf.lower, pf.upper) == (0.0, 0.0)

    def test_per_unit_bounds(self, three_bus_case):
        model = build_dispatch_model(three_bus_case, (1, 1, 1), (1,), [80.0], [30.0])
        assert model.variables[model.index_of("pg_1")].upper == 1.0
        assert model.variables[model.index_of("shed_1")].upper == 0.8


# ============================================================================
# Duality and monotonicity
# ============================================================================


class TestDuality:

    def test_dual_objective_matches_on_random_instances(self, backend):
        rng = np.random.default_rng(11)
        cases = [make_three_bus_case(), make_radial_case()]
        for trial in range(100):
            case = cases[trial % 2]
            branch_alive = tuple(int(v) for v in rng.integers(0, 2, len(case.branches)))
            gen_alive = tuple(int(v) for v in rng.integers(0, 2, len(case.generators)))
            loads = [l.expected_mw + rng.uniform(-l.dev_down_mw, l.dev_up_mw) for l in case.loads]
            wind = [w.expected_mw + rng.uniform(-w.dev_down_mw, w.dev_up_mw)
                    for w in case.wind_farms]
            result = solve_dispatch_values(case, branch_alive, gen_alive, loads, wind, backend)
            assert dispatch_dual_objective(case, result) == pytest.approx(
                result.total_shed, abs=1e-6)

    def test_destroyed_branch_has_zero_mu(self, three_bus_case, backend):
        result = solve_dispatch_values(three_bus_case, (0, 1, 1), (1,), [100.0], [20.0], backend)
        assert result.duals.mu[0] == 0.0


class TestMonotonicity:

    @pytest.mark.parametrize("factory", [make_radial_case, make_three_bus_case])
    def test_losing_generators_never_helps(self, factory, backend):
        case = factory()
        for z in enumerate_extreme_realizations(case):
            previous = -1.0
            for hit in range(len(case.generators) + 1):
                alive = tuple(int(p >= hit) for p in range(len(case.generators)))
                shed = solve_dispatch_values(case, (1,) * len(case.branches), alive,
                                             z.realized_loads(case), z.realized_wind(case),
                                             backend).total_shed
                assert shed >= previous - MW_TOL
                previous = shed

    def test_radial_attacks_are_monotone(self, radial_case, backend):
        case = radial_case
        n_b, n_g = len(case.branches), len(case.generators)
        loads = [l.expected_mw + l.dev_up_mw for l in case.loads]
        cache = {}

        def shed(hit):
            if hit not in cache:
                cache[hit] = solve_dispatch_values(
                    case, tuple(int(p not in hit) for p in range(n_b)),
                    tuple(int(n_b + p not in hit) for p in range(n_g)), loads, [],
                    backend).total_shed
            return cache[hit]

        elements = range(n_b + n_g)
        for size in range(n_b + n_g):
            for hit in itertools.combinations(elements, size):
                for extra in elements:
                    if extra not in hit:
                        bigger = tuple(sorted(hit + (extra,)))
                        assert shed(bigger) >= shed(hit) - MW_TOL

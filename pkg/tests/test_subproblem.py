# -*- coding: utf-8 -*-
"""
Tests for src/optimization/subproblem.py: the symbolic dual, big-M
bounds and the attacker + nature MILP.
"""
from __future__ import annotations

import numpy as np
import pytest

from src.core.config_loader import DefenseConfig
from src.core.exceptions import BigMError, PostCheckError
from src.core.itertools_helpers import budget_subsets
from src.grid.case import Budgets
from src.grid.uncertainty import check_budget, enumerate_extreme_realizations
from src.optimization.dispatch import solve_dispatch
from src.optimization.plans import AttackPlan, DefensePlan
from src.optimization.subproblem import (
    BASE_DUAL_BOUNDS,
    BigMConfig,
    build_subproblem,
    derive_dual_model,
    price_spread,
    solve_subproblem,
)

from tests.conftest import (
    MW_TOL,
    make_radial_case,
    make_single_bus_case,
    make_stiff_loop_case,
    make_three_bus_case,
)


def _brute_force_eta(case, defense, backend):
    costs = [b.attack_cost for b in case.branches] + [g.attack_cost for g in case.generators]
    best = 0.0
    for hit in budget_subsets(costs, case.budgets.attack_budget):
        attack = AttackPlan.from_positions(case, hit)
        for z in enumerate_extreme_realizations(case):
            best = max(best, solve_dispatch(case, defense, attack, z, backend).total_shed)
    return best


def _all_single_defenses(case):
    plans = [DefensePlan.empty(case)]
    plans.extend(DefensePlan.from_positions(case, [p])
                 for p in range(len(case.branches) + len(case.generators)))
    return plans


# ============================================================================
# Big-M configuration
# ============================================================================


class TestBigMConfig:

    def test_default_bounds(self):
        bounds = BigMConfig().dual_bounds()
        assert bounds["lam"] == 10.0
        assert bounds["mu"] == 40.0

    def test_scaled(self):
        assert BigMConfig().scaled(2.0).dual_bounds()["theta"] == 80.0

    def test_explicit_m(self):
        assert BigMConfig(dual_bound_m=1.0).dual_bounds() == BASE_DUAL_BOUNDS

    def test_below_analytic_minimum(self):
        with pytest.raises(BigMError, match="below their analytic minimum"):
            BigMConfig(dual_bound_m=0.5).dual_bounds()

    def test_override_below_minimum(self):
        with pytest.raises(BigMError, match="mu="):
            BigMConfig(overrides=(("mu", 2.0),)).dual_bounds()

    @pytest.mark.parametrize("kwargs", [
        {"safety_factor": 0.0}, {"angle_bound_rad": -1.0}, {"dual_bound_m": 0.0},
        {"overrides": (("rho", 3.0),)}, {"overrides": (("lam", -1.0),)},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(BigMError):
            BigMConfig(**kwargs)

    def test_invalid_rescale_count(self):
        with pytest.raises(BigMError, match="max_rescales"):
            BigMConfig(max_rescales=-1)

    def test_rescale_count_from_config(self, tmp_path):
        path = tmp_path / "grid_defense.ini"
        path.write_text("[bigm]\nmax_rescales = 5\n", encoding="utf-8")
        config = DefenseConfig()
        config.load(str(path))
        assert BigMConfig.from_config(config).max_rescales == 5


class TestPriceSpread:

    def test_meshed_case_widens_bounds(self, three_bus_case):
        assert price_spread(three_bus_case) == pytest.approx(2.0)
        assert BigMConfig().dual_bounds(three_bus_case)["lam"] == pytest.approx(20.0)

    def test_stiff_loop(self):
        assert price_spread(make_stiff_loop_case()) == pytest.approx(101.0)

    def test_radial_case_keeps_bounds(self, radial_case):
        assert price_spread(radial_case) == 1.0
        assert BigMConfig().dual_bounds(radial_case) == BigMConfig().dual_bounds()

    def test_no_branches(self, single_bus_case):
        assert price_spread(single_bus_case) == 1.0

    def test_explicit_m_ignores_spread(self, three_bus_case):
        assert BigMConfig(dual_bound_m=1.0).dual_bounds(three_bus_case) == BASE_DUAL_BOUNDS


# ============================================================================
# Symbolic dual
# ============================================================================


class TestDualModel:

    def test_shape(self, three_bus_case):
        dual = derive_dual_model(three_bus_case, DefensePlan.empty(three_bus_case))
        # 3 lam, 3 x (mu, th_lo, th_up), 1 gam, 1 beta, 1 alpha
        assert len(dual.variables) == 15
        assert dual.variable("th_up_2").sign == "nonpos"
        # 3 angle rows, 3 flow rows, gen, wind, shed
        assert len(dual.rows) == 9

    def test_defended_elements_carry_no_tag(self, three_bus_case):
        defense = DefensePlan.from_ids(three_bus_case, branches=[1], generators=[1])
        dual = derive_dual_model(three_bus_case, defense)
        tags = {t.survival for row in dual.rows for t in row.terms if t.survival}
        assert tags == {("branch", 1), ("branch", 2)}

    @pytest.mark.parametrize("factory", [make_three_bus_case, make_radial_case])
    def test_dual_value_equals_primal_shed(self, factory, backend):
        case = factory()
        defense = DefensePlan.empty(case)
        dual = derive_dual_model(case, defense)
        rng = np.random.default_rng(3)
        n = len(case.branches) + len(case.generators)
        for z in enumerate_extreme_realizations(case):
            hit = [p for p in range(n) if rng.random() < 0.4]
            attack = AttackPlan.from_positions(case, hit)
            model = dual.instantiate(case, attack, z, objective_scale=case.base_mva)
            value = backend.solve_lp(model).objective
            shed = solve_dispatch(case, defense, attack, z, backend).total_shed
            assert value == pytest.approx(shed, abs=1e-6)


# ============================================================================
# Subproblem MILP
# ============================================================================


class TestSubproblem:

    def test_single_bus_worst_case(self, backend):
        case = make_single_bus_case(load_dev=30.0, budgets=Budgets(0.0, 1.0, 1.0, 0.0))
        solution = solve_subproblem(case, DefensePlan.empty(case), backend=backend)
        assert solution.eta == pytest.approx(110.0, abs=MW_TOL)
        assert solution.attack.attacked_gen_ids(case) == [1]
        assert solution.realization.load_z_up == (1.0,)
        assert solution.confirmed_shed == pytest.approx(solution.eta, abs=MW_TOL)

    def test_single_bus_defended(self, backend):
        case = make_single_bus_case(load_dev=30.0, budgets=Budgets(1.0, 1.0, 1.0, 0.0))
        solution = solve_subproblem(case, DefensePlan.from_ids(case, generators=[1]),
                                    backend=backend)
        assert solution.eta == pytest.approx(10.0, abs=MW_TOL)
        assert solution.attack.is_empty()

    def test_matches_enumeration_on_three_bus(self, three_bus_case, backend):
        case = three_bus_case
        for defense in _all_single_defenses(case):
            solution = solve_subproblem(case, defense, backend=backend)
            assert solution.eta == pytest.approx(_brute_force_eta(case, defense, backend), abs=1e-5)
            assert solution.attack.violations(case) == []
            assert check_budget(solution.realization, case.budgets, case) == []

    def test_matches_enumeration_on_radial(self, radial_case, backend):
        defense = DefensePlan.empty(radial_case)
        solution = solve_subproblem(radial_case, defense, backend=backend)
        assert solution.eta == pytest.approx(_brute_force_eta(radial_case, defense, backend),
                                             abs=1e-5)

    def test_scaling_big_m_keeps_value(self, three_bus_case, backend):
        defense = DefensePlan.empty(three_bus_case)
        base = solve_subproblem(three_bus_case, defense, BigMConfig(), backend).eta
        scaled = solve_subproblem(three_bus_case, defense, BigMConfig().scaled(2.0), backend).eta
        assert scaled == pytest.approx(base, abs=1e-5)

    def test_no_attack_budget(self, backend):
        case = make_three_bus_case(Budgets(0.0, 0.0, 1.0, 1.0))
        solution = solve_subproblem(case, DefensePlan.empty(case), backend=backend)
        assert solution.attack.is_empty()
        assert solution.eta == pytest.approx(0.0, abs=MW_TOL)

    def test_duals_are_reported(self, three_bus_case, backend):
        solution = solve_subproblem(three_bus_case, DefensePlan.empty(three_bus_case),
                                    backend=backend)
        assert "lam_2" in solution.duals
        assert "v_f_1" not in solution.duals

    def test_defended_elements_have_no_attack_binary(self, three_bus_case):
        defense = DefensePlan.from_ids(three_bus_case, branches=[2])
        model = build_subproblem(three_bus_case, defense).model
        names = {v.name for v in model.variables}
        assert "v_f_2" not in names
        assert {"v_f_1", "v_f_3", "v_g_1"} <= names

    def test_dump(self, tmp_path, three_bus_case, backend):
        path = tmp_path / "sub.lp"
        solve_subproblem(three_bus_case, DefensePlan.empty(three_bus_case), backend=backend,
                         dump_path=str(path))
        assert path.read_text(encoding="utf-8").startswith("\\ model subproblem")

    def test_stiff_loop_matches_enumeration(self, backend):
        case = make_stiff_loop_case()
        defense = DefensePlan.from_ids(case, branches=[1], generators=[1])
        solution = solve_subproblem(case, defense, backend=backend)
        assert solution.eta == pytest.approx(74.5, abs=MW_TOL)
        assert solution.eta == pytest.approx(_brute_force_eta(case, defense, backend), abs=MW_TOL)
        assert solution.attack.attacked_gen_ids(case) == [2]

    def test_tight_bounds_are_rescaled(self, backend):
        case = make_stiff_loop_case()
        defense = DefensePlan.from_ids(case, branches=[1], generators=[1])
        bigm = BigMConfig(dual_bound_m=1.0, max_rescales=4)
        solution = solve_subproblem(case, defense, bigm, backend)
        assert solution.eta == pytest.approx(74.5, abs=MW_TOL)
        assert solution.stats["bigm_rescales"] >= 1

    def test_rescales_exhausted(self, backend):
        case = make_stiff_loop_case()
        defense = DefensePlan.from_ids(case, branches=[1], generators=[1])
        with pytest.raises(PostCheckError):
            solve_subproblem(case, defense, BigMConfig(dual_bound_m=1.0, max_rescales=0), backend)

    @pytest.mark.parametrize("factory", [make_three_bus_case, make_radial_case,
                                         make_stiff_loop_case])
    def test_value_never_rises_with_more_defense(self, factory, backend):
        case = factory()
        n = len(case.branches) + len(case.generators)
        previous = None
        for k in range(n + 1):
            eta = solve_subproblem(case, DefensePlan.from_positions(case, range(k)),
                                   backend=backend).eta
            if previous is not None:
                assert eta <= previous + MW_TOL
            previous = eta

# -*- coding: utf-8 -*-
"""
The trilevel defense problem: operator dispatch, attacker/nature
subproblem, defender master, the C&CG loop and the enumeration oracle.
"""
from __future__ import annotations

from .plans import AttackPlan, DefensePlan, survival
from .dispatch import DispatchResult, solve_dispatch
from .subproblem import BigMConfig, solve_subproblem
from .master import Scenario, solve_master
from .ccg import CcgParams, CcgReport, ccg_solve
from .oracle import OracleCaps, OracleResult, oracle_solve, validate_extreme_points

# -*- coding: utf-8 -*-
"""
Core plumbing for the grid defense planner: exceptions, configuration,
logging set-up and combinatorics helpers.
"""
from __future__ import annotations

from .exceptions import GridDefenseError, CaseError, SolverError, ConsistencyError
from .config_loader import DefenseConfig, load_defense_config

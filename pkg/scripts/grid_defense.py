#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Entry point for the grid defense planner.

Usage:
    python scripts/grid_defense.py solve [--case PATH] [--out DIR] [--verbose]
    python scripts/grid_defense.py sweep defense_budget 0 1 2 3 4 5 --jobs 3
    python scripts/grid_defense.py oracle-check --random 20 --seed 42
    python scripts/grid_defense.py validate --case data/cases/three_bus.json
    python scripts/grid_defense.py compare
"""
from __future__ import annotations

import os
import sys

# Make the ``src`` package importable when run from a checkout
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir))

from src.cli.commands import main


if __name__ == "__main__":
    sys.exit(main())

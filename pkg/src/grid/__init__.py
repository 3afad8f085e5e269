# -*- coding: utf-8 -*-
"""
Grid instances: case types, the case-document codec, the RTS-79 study
case and the load/wind uncertainty sets.
"""
from __future__ import annotations

from .case import Branch, Budgets, Bus, Generator, GridCase, LoadPoint, WindFarm, incidence
from .case_codec import load_case, parse_case, serialize_case
from .rts79 import make_modified_rts79
from .uncertainty import (UncertaintyRealization, check_budget, enumerate_extreme_realizations,
                          realize_load, realize_wind)

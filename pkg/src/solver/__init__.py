# -*- coding: utf-8 -*-
"""
LP/MILP solving: the neutral model container and the pluggable backends.
"""
from __future__ import annotations

from .model import LinearModel, ModelBuilder, SolveOutcome
from .backend import BackendPool, BackendSettings, SolverBackend, available_backends, get_backend

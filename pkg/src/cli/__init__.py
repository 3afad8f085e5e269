# -*- coding: utf-8 -*-
"""
Command-line front end: run configuration, sweeps and subcommands.
"""
from __future__ import annotations

from .run_config import RunConfig
from .commands import build_parser, main

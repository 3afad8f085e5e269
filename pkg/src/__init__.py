# -*- coding: utf-8 -*-
"""Grid defense planner: defender-attacker-nature-operator planning on
DC power networks."""

__version__ = "1.0.0"

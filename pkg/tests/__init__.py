# -*- coding: utf-8 -*-
"""Test suite for the grid defense planner."""

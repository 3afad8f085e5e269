# -*- coding: utf-8 -*-
"""
Iterator and combinatorics helpers for the grid defense planner.

The oracle and the extreme-point enumeration walk budget-limited
subsets of grid elements and signed subsets of uncertain injections.
These helpers wrap ``itertools`` with the deterministic orderings the
rest of the planner relies on.
"""
from __future__ import annotations

import itertools
import math


# ---------------------------------------------------------------------------
# Grouping -- components by bus for balance rows
# ---------------------------------------------------------------------------

def group_by_key(iterable, key_func):
    """Group items by a key function, returning a dict of lists in
    first-seen order."""
    groups = {}
    for item in iterable:
        groups.setdefault(key_func(item), []).append(item)
    return groups


# ---------------------------------------------------------------------------
# Budget-limited subsets -- defense and attack plans
# ---------------------------------------------------------------------------

def budget_subsets(costs, budget, tol=1e-9):
    """Yield index tuples whose total cost stays within *budget*.

    Order: by subset size, then lexicographic by index.  The empty
    subset always comes first.  Costs must be positive.
    """
    n = len(costs)
    cheapest = sorted(costs)
    for size in range(n + 1):
        if sum(cheapest[:size]) > budget + tol:
            break
        for combo in itertools.combinations(range(n), size):
            if sum(costs[i] for i in combo) <= budget + tol:
                yield combo


def count_budget_subsets(costs, budget, cap=None, tol=1e-9):
    """Count the subsets ``budget_subsets`` would yield.

    Uniform costs use the closed form sum of binomials; mixed costs are
    counted by walking the subsets, stopping one past *cap* when given.
    """
    n = len(costs)
    if n == 0:
        return 1
    if max(costs) - min(costs) <= tol:
        largest = min(n, int(math.floor(budget / costs[0] + tol)))
        return sum(math.comb(n, k) for k in range(largest + 1))
    count = 0
    for _ in budget_subsets(costs, budget, tol):
        count += 1
        if cap is not None and count > cap:
            break
    return count


# ---------------------------------------------------------------------------
# Signed subsets -- vertices of a budget uncertainty set
# ---------------------------------------------------------------------------

UP, DOWN = "up", "down"


def signed_subsets(n, budget, accept=None):
    """Yield tuples of ``(index, direction)`` pairs: every choice of at
    most *budget* distinct indices out of *n*, each with direction up or
    down.  Order: by number of active indices, then index combination,
    then up-before-down per position.

    *accept*, when given, is called with each index combination and
    drops the ones it returns false for.
    """
    largest = min(n, int(budget))
    for size in range(largest + 1):
        for combo in itertools.combinations(range(n), size):
            if accept is not None and not accept(combo):
                continue
            for directions in itertools.product((UP, DOWN), repeat=size):
                yield tuple(zip(combo, directions))


def count_signed_subsets(n, budget):
    """Number of tuples ``signed_subsets(n, budget)`` yields."""
    largest = min(n, int(budget))
    return sum(math.comb(n, a) * 2 ** a for a in range(largest + 1))

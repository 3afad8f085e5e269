# -*- coding: utf-8 -*-
"""
Defense and attack plans.

Both plans are binary vectors over (branches, generators) in case order.
A defense marks protected elements with 1.  An attack marks *intact*
elements with 1, so 0 means attacked.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

BUDGET_TOL = 1e-9


def survival(w, v):
    """1 when an element stays in service: defended or not attacked."""
    if w not in (0, 1) or v not in (0, 1):
        raise ValueError("survival expects binary inputs (got w=%r, v=%r)" % (w, v))
    return w + v - w * v


def _positions(ids, items, kind):
    known = {item.id: pos for pos, item in enumerate(items)}
    try:
        return {known[i] for i in ids}
    except KeyError as e:
        raise KeyError("unknown %s id %s" % (kind, e))


def _bits(values):
    return "".join("1" if v else "0" for v in values)


@dataclass(frozen=True)
class DefensePlan:
    branch_defend: Tuple[int, ...]
    gen_defend: Tuple[int, ...]

    @classmethod
    def empty(cls, case):
        return cls((0,) * len(case.branches), (0,) * len(case.generators))

    @classmethod
    def from_ids(cls, case, branches=(), generators=()):
        b = _positions(branches, case.branches, "branch")
        g = _positions(generators, case.generators, "generator")
        return cls(tuple(int(p in b) for p in range(len(case.branches))),
                   tuple(int(p in g) for p in range(len(case.generators))))

    @classmethod
    def from_positions(cls, case, positions):
        """Positions index branches first, then generators."""
        chosen = set(positions)
        n_b = len(case.branches)
        return cls(tuple(int(p in chosen) for p in range(n_b)),
                   tuple(int(n_b + p in chosen) for p in range(len(case.generators))))

    def defended_branch_ids(self, case):
        return sorted(br.id for br, w in zip(case.branches, self.branch_defend) if w)

    def defended_gen_ids(self, case):
        return sorted(g.id for g, w in zip(case.generators, self.gen_defend) if w)

    def cost(self, case):
        return (sum(br.defense_cost for br, w in zip(case.branches, self.branch_defend) if w)
                + sum(g.defense_cost for g, w in zip(case.generators, self.gen_defend) if w))

    def violations(self, case):
        found = []
        if len(self.branch_defend) != len(case.branches) or len(self.gen_defend) != len(case.generators):
            found.append("defense plan dimensions do not match the case")
            return found
        cost = self.cost(case)
        if cost > case.budgets.defense_budget + BUDGET_TOL:
            found.append("defense cost %r exceeds budget %r" % (cost, case.budgets.defense_budget))
        return found

    def signature(self):
        return "w:%s|%s" % (_bits(self.branch_defend), _bits(self.gen_defend))


@dataclass(frozen=True)
class AttackPlan:
    branch_intact: Tuple[int, ...]
    gen_intact: Tuple[int, ...]

    @classmethod
    def none(cls, case):
        return cls((1,) * len(case.branches), (1,) * len(case.generators))

    @classmethod
    def from_ids(cls, case, branches=(), generators=()):
        """Plan attacking the given branch and generator ids."""
        b = _positions(branches, case.branches, "branch")
        g = _positions(generators, case.generators, "generator")
        return cls(tuple(int(p not in b) for p in range(len(case.branches))),
                   tuple(int(p not in g) for p in range(len(case.generators))))

    @classmethod
    def from_positions(cls, case, positions):
        hit = set(positions)
        n_b = len(case.branches)
        return cls(tuple(int(p not in hit) for p in range(n_b)),
                   tuple(int(n_b + p not in hit) for p in range(len(case.generators))))

    def attacked_branch_ids(self, case):
        return sorted(br.id for br, v in zip(case.branches, self.branch_intact) if not v)

    def attacked_gen_ids(self, case):
        return sorted(g.id for g, v in zip(case.generators, self.gen_intact) if not v)

    def is_empty(self):
        return all(self.branch_intact) and all(self.gen_intact)

    def cost(self, case):
        return (sum(br.attack_cost for br, v in zip(case.branches, self.branch_intact) if not v)
                + sum(g.attack_cost for g, v in zip(case.generators, self.gen_intact) if not v))

    def violations(self, case):
        found = []
        if len(self.branch_intact) != len(case.branches) or len(self.gen_intact) != len(case.generators):
            found.append("attack plan dimensions do not match the case")
            return found
        cost = self.cost(case)
        if cost > case.budgets.attack_budget + BUDGET_TOL:
            found.append("attack cost %r exceeds budget %r" % (cost, case.budgets.attack_budget))
        return found

    def effective(self, defense):
        """Same attack without the hits that land on defended elements."""
        return AttackPlan(
            tuple(survival(w, v) for w, v in zip(defense.branch_defend, self.branch_intact)),
            tuple(survival(w, v) for w, v in zip(defense.gen_defend, self.gen_intact)))

    def signature(self):
        return "v:%s|%s" % (_bits(self.branch_intact), _bits(self.gen_intact))

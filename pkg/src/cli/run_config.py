# -*- coding: utf-8 -*-
"""
Run configuration: the case source plus every command-line override,
resolved against the INI configuration.

Precedence is flags, then ``config/grid_defense.ini``, then built-in
defaults.  Budget and deviation overrides are applied to the loaded
case, which re-validates it.
"""
from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from src.core.config_loader import load_defense_config
from src.grid.case_codec import load_case
from src.grid.rts79 import make_modified_rts79
from src.optimization.ccg import CcgParams
from src.optimization.oracle import OracleCaps

log = logging.getLogger(__name__)

BUILTIN_RTS79 = "rts79"

SWEEP_PARAMETERS = ("defense_budget", "attack_budget", "load_deviation", "wind_deviation")


@dataclass(frozen=True)
class CaseOverrides:
    defense_budget: Optional[float] = None
    attack_budget: Optional[float] = None
    load_uncertainty_budget: Optional[float] = None
    wind_uncertainty_budget: Optional[float] = None
    load_deviation_mw: Optional[float] = None
    wind_deviation_fraction: Optional[float] = None
    conventional: bool = False

    def apply(self, case):
        budgets = {k: v for k, v in (("defense_budget", self.defense_budget),
                                     ("attack_budget", self.attack_budget),
                                     ("load_uncertainty_budget", self.load_uncertainty_budget),
                                     ("wind_uncertainty_budget", self.wind_uncertainty_budget))
                   if v is not None}
        if self.conventional:
            budgets.update(load_uncertainty_budget=0.0, wind_uncertainty_budget=0.0)
        if budgets:
            case = case.with_budgets(**budgets)
        if self.load_deviation_mw is not None:
            case = case.with_load_deviation(self.load_deviation_mw)
        if self.wind_deviation_fraction is not None:
            case = case.with_wind_deviation(self.wind_deviation_fraction)
        return case


def apply_sweep_value(case, parameter, value):
    """Case with one sweep knob set to *value*."""
    if parameter == "defense_budget":
        return case.with_budgets(defense_budget=float(value))
    if parameter == "attack_budget":
        return case.with_budgets(attack_budget=float(value))
    if parameter == "load_deviation":
        return case.with_load_deviation(float(value))
    if parameter == "wind_deviation":
        return case.with_wind_deviation(float(value))
    raise ValueError("unknown sweep parameter %r (choose from %s)" % (
        parameter, ", ".join(SWEEP_PARAMETERS)))


@dataclass(frozen=True)
class RunConfig:
    case_path: Optional[str] = None
    overrides: CaseOverrides = field(default_factory=CaseOverrides)
    ccg: CcgParams = field(default_factory=CcgParams)
    oracle_caps: OracleCaps = field(default_factory=OracleCaps)
    out_dir: str = "results"
    dump_models: bool = False
    backend: Optional[str] = None
    jobs: int = 1
    seed: int = 0
    random_instances: int = 0
    samples: int = 0
    sweep_parameter: Optional[str] = None
    sweep_values: Tuple[float, ...] = ()
    loss_threshold: Optional[float] = None
    normalize: bool = False

    @classmethod
    def from_args(cls, args, config=None):
        """Build from an ``argparse.Namespace``; absent flags fall back to
        *config*."""
        config = config or load_defense_config(getattr(args, "config", None))
        ccg = CcgParams.from_config(config)
        changes = {}
        if getattr(args, "gap_abs", None) is not None:
            changes["gap_abs"] = args.gap_abs
        if getattr(args, "max_iters", None) is not None:
            changes["max_iterations"] = args.max_iters
        if getattr(args, "big_m_scale", None) is not None:
            changes["bigm"] = ccg.bigm.scaled(args.big_m_scale)
        if changes:
            ccg = dataclasses.replace(ccg, **changes)

        overrides = CaseOverrides(
            defense_budget=getattr(args, "defense_budget", None),
            attack_budget=getattr(args, "attack_budget", None),
            load_uncertainty_budget=getattr(args, "ud", None),
            wind_uncertainty_budget=getattr(args, "uw", None),
            load_deviation_mw=getattr(args, "load_dev", None),
            wind_deviation_fraction=getattr(args, "wind_dev", None),
            conventional=bool(getattr(args, "conventional", False)),
        )
        parameter = getattr(args, "parameter", None)
        if parameter is not None and parameter not in SWEEP_PARAMETERS:
            raise ValueError("unknown sweep parameter %r" % parameter)
        return cls(
            case_path=getattr(args, "case", None),
            overrides=overrides,
            ccg=ccg,
            oracle_caps=OracleCaps.from_config(config),
            out_dir=getattr(args, "out", None) or config.get("output", "out_dir", "results"),
            dump_models=bool(getattr(args, "dump_models", False)),
            backend=getattr(args, "backend", None),
            jobs=max(1, int(getattr(args, "jobs", None) or 1)),
            seed=int(getattr(args, "seed", None) or 0),
            random_instances=int(getattr(args, "random", None) or 0),
            samples=int(getattr(args, "samples", None) or 0),
            sweep_parameter=parameter,
            sweep_values=tuple(getattr(args, "values", None) or ()),
            loss_threshold=getattr(args, "loss_threshold", None),
            normalize=bool(getattr(args, "normalize", False)),
        )

    def load_case(self):
        """The case with every override applied (re-validated)."""
        if not self.case_path or self.case_path == BUILTIN_RTS79:
            log.info("Using the built-in modified RTS-79 case")
            case = make_modified_rts79()
        else:
            case = load_case(self.case_path)
        return self.overrides.apply(case)

    @property
    def case_name(self):
        if not self.case_path or self.case_path == BUILTIN_RTS79:
            return "modified_rts79"
        return os.path.splitext(os.path.basename(self.case_path))[0]

    def output_path(self, filename):
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, filename)

    def models_dir(self):
        if not self.dump_models:
            return None
        path = os.path.join(self.out_dir, "models")
        os.makedirs(path, exist_ok=True)
        return path

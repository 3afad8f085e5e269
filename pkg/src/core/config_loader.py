# -*- coding: utf-8 -*-
"""
Configuration loader for the grid defense planner.

Reads ``config/grid_defense.ini`` via ``configparser.ConfigParser``
and exposes typed accessors to the rest of the system.  Also provides
environment-variable interpolation and the built-in defaults used when
no configuration file is found, so library calls work without any
file on disk.
"""
from __future__ import annotations

import logging
import os
import re
import configparser

log = logging.getLogger(__name__)

CONFIG_FILENAME = "grid_defense.ini"

# Environment variable that selects the solver backend; wins over the
# [solver] backend key.
BACKEND_ENV_VAR = "GRID_DEFENSE_BACKEND"

# Default config file search paths, in priority order
CONFIG_SEARCH_PATHS = [
    os.path.join(os.path.dirname(__file__), os.pardir, os.pardir, "config"),
    "/etc/grid_defense",
]

DEFAULTS = {
    "solver": {
        "backend": "highs",
        "mip_rel_gap": "1e-9",
        "time_limit_s": "3600",
        "feasibility_tol": "1e-6",
        "debug_duality_check": "false",
    },
    "ccg": {
        "gap_abs_mw": "1e-4",
        "gap_rel": "1e-6",
        "max_iterations": "20",
    },
    "bigm": {
        "safety_factor": "10",
        "angle_bound_rad": "3.141592653589793",
        "max_rescales": "3",
    },
    "oracle": {
        "max_defenses": "100000",
        "max_leaves": "100000",
        "wall_clock_s": "600",
    },
    "uncertainty": {
        "max_realizations": "10000000",
    },
    "output": {
        "out_dir": "results",
    },
    "logging": {
        "config_file": "",
        "level": "INFO",
    },
}

_ENV_TOKEN = re.compile(r"\$\{([^}]+)\}")


class DefenseConfig(object):
    """Thin wrapper around ``ConfigParser`` with typed access and
    environment-variable substitution."""

    def __init__(self, config_path=None):
        self._parser = configparser.ConfigParser()
        self._parser.read_dict(DEFAULTS)
        self._path = config_path
        self._loaded = False

    # ---------------------------------------------------------------
    # Loading
    # ---------------------------------------------------------------

    def load(self, path=None):
        """Read the INI file from *path* or search the default locations."""
        if path is not None:
            self._path = path

        if self._path and os.path.isfile(self._path):
            log.debug("Loading config from %s", self._path)
            self._parser.read(self._path)
            self._loaded = True
            return

        for search_dir in CONFIG_SEARCH_PATHS:
            candidate = os.path.join(search_dir, CONFIG_FILENAME)
            if os.path.isfile(candidate):
                log.debug("Found config at %s", candidate)
                self._parser.read(candidate)
                self._path = os.path.normpath(candidate)
                self._loaded = True
                return

        log.info("No configuration file found; using built-in defaults")

    def is_loaded(self):
        return self._loaded

    @property
    def path(self):
        return self._path

    # ---------------------------------------------------------------
    # Typed accessors
    # ---------------------------------------------------------------

    def get(self, section, key, fallback=None):
        try:
            value = self._parser.get(section, key)
            return self._interpolate_env(value)
        except (configparser.NoSectionError, configparser.NoOptionError):
            return fallback

    def get_int(self, section, key, fallback=0):
        raw = self.get(section, key)
        if raw is None:
            return fallback
        try:
            return int(float(raw))
        except (ValueError, TypeError):
            log.warning("Config: bad integer for [%s] %s = %r", section, key, raw)
            return fallback

    def get_float(self, section, key, fallback=0.0):
        raw = self.get(section, key)
        if raw is None:
            return fallback
        try:
            return float(raw)
        except (ValueError, TypeError):
            log.warning("Config: bad float for [%s] %s = %r", section, key, raw)
            return fallback

    def get_bool(self, section, key, fallback=False):
        raw = self.get(section, key)
        if raw is None:
            return fallback
        return raw.strip().lower() in ("1", "true", "yes", "on")

    # ---------------------------------------------------------------
    # Derived settings
    # ---------------------------------------------------------------

    def backend_name(self):
        """Solver backend name; the environment variable wins."""
        env_value = os.environ.get(BACKEND_ENV_VAR)
        if env_value:
            return env_value.strip().lower()
        return self.get("solver", "backend", fallback="highs").strip().lower()

    # ---------------------------------------------------------------
    # Environment variable interpolation
    # ---------------------------------------------------------------

    @staticmethod
    def _interpolate_env(value):
        """Replace ``${VAR}`` tokens with the corresponding environment
        variable, or leave the token in place if the variable is unset."""
        if "${" not in value:
            return value

        def _replace(match):
            return os.environ.get(match.group(1), match.group(0))
        return _ENV_TOKEN.sub(_replace, value)

    def dump(self):
        """Log the effective configuration at DEBUG level."""
        log.debug("--- grid defense configuration (source: %s) ---", self._path)
        for section in self._parser.sections():
            for key, value in self._parser.items(section):
                log.debug("  [%s] %s = %s", section, key, value)


# -------------------------------------------------------------------
# Module-level convenience: load once and share
# -------------------------------------------------------------------

_global_config = None


def load_defense_config(path=None):
    """Load (or return the already-loaded) planner configuration."""
    global _global_config
    if _global_config is None or (path is not None and path != _global_config.path):
        _global_config = DefenseConfig(path)
        _global_config.load(path)
    return _global_config


def reset_defense_config():
    """Forget the cached configuration (used by tests)."""
    global _global_config
    _global_config = None

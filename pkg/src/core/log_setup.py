# -*- coding: utf-8 -*-
"""
Logging set-up shared by the command-line tools.

Library modules only ever call ``logging.getLogger(__name__)``; the
handlers are installed here, once, from ``config/logging.conf`` when it
exists and from ``logging.basicConfig`` otherwise.
"""
from __future__ import annotations

import logging
import logging.config
import os

DEFAULT_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_configured = False


def _resolve_config_file(config):
    candidate = config.get("logging", "config_file", fallback="") if config else ""
    if candidate:
        return candidate
    if config is not None and config.path:
        sibling = os.path.join(os.path.dirname(config.path), "logging.conf")
        if os.path.isfile(sibling):
            return sibling
    return None


def configure_logging(config=None, verbose=False):
    """Install logging handlers.  Safe to call more than once."""
    global _configured
    level_name = "DEBUG" if verbose else (
        config.get("logging", "level", fallback="INFO") if config else "INFO")
    level = getattr(logging, level_name.upper(), logging.INFO)

    if not _configured:
        config_file = _resolve_config_file(config)
        if config_file and os.path.isfile(config_file):
            logging.config.fileConfig(config_file, disable_existing_loggers=False)
        else:
            logging.basicConfig(level=level, format=DEFAULT_FORMAT)
        _configured = True

    logging.getLogger("src").setLevel(level)
    return level

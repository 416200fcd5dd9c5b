"""
Package logging for convex-equipart

Every module logs through ``logging.getLogger(__name__)``; the helpers here
attach one stream handler to the package logger and set its level.
"""

import logging

PACKAGE_LOGGER = "convex_equipart"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_handler = logging.StreamHandler()
_handler.setFormatter(logging.Formatter(LOG_FORMAT))


def configure_logging(level: int = logging.INFO) -> logging.Logger:
    """
    Set the package logger's level, attaching the stream handler on first use.

    Returns:
        The package logger
    """
    package = logging.getLogger(PACKAGE_LOGGER)
    if _handler not in package.handlers:
        package.addHandler(_handler)
    package.setLevel(level)
    return package


def level_for(verbose: bool) -> int:
    """Map a verbose flag onto a logging level."""
    return logging.DEBUG if verbose else logging.INFO


def enable_verbose() -> logging.Logger:
    """Route DEBUG records of every package module through the package handler."""
    return configure_logging(logging.DEBUG)

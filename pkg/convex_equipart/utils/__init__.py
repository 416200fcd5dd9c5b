"""
Utils module for convex-equipart
"""

from .logger import LOG_FORMAT, PACKAGE_LOGGER, configure_logging, enable_verbose, level_for

__all__ = ['LOG_FORMAT', 'PACKAGE_LOGGER', 'configure_logging', 'enable_verbose', 'level_for']

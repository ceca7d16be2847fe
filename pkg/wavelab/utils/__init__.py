"""Utility modules."""

from .logger import RunLogger, setup_logging

__all__ = ["RunLogger", "setup_logging"]

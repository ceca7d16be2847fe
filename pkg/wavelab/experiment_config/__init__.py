"""Experiment configuration management."""

from .loader import ConfigLoader, config_hash, dump_config, parse_config
from .schema import BATTERY_ITEMS, ExperimentConfig

__all__ = ["BATTERY_ITEMS", "ConfigLoader", "ExperimentConfig", "config_hash", "dump_config", "parse_config"]

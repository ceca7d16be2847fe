"""Experiment configuration loader."""

import hashlib
import json
from pathlib import Path

import yaml
from pydantic import ValidationError

from ..errors import ConfigurationError
from .schema import ExperimentConfig

CONFIG_SUFFIXES = (".yaml", ".yml")


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse YAML text into an ExperimentConfig.

    Args:
        text: YAML document.
        source: Name used in diagnostics.

    Returns:
        Validated ExperimentConfig.

    Raises:
        ConfigurationError: If the YAML is malformed or fails validation.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"{source}: malformed YAML: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping, got {type(data).__name__}")

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"{source}: invalid config:\n{e}") from e


def dump_config(config: ExperimentConfig) -> str:
    """Canonical YAML text of a config (every field, declaration order)."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False, default_flow_style=False)


def config_hash(config: ExperimentConfig) -> str:
    """First 12 hex characters of the sha256 of the canonical JSON dump."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


class ConfigLoader:
    """Load and manage experiment configurations."""

    def __init__(self, config_dir: Path | None = None):
        """Initialize config loader.

        Args:
            config_dir: Directory containing experiment YAML files.
                       Defaults to ./configs relative to package root.
        """
        if config_dir is None:
            config_dir = Path(__file__).parent.parent.parent / "configs"
        self.config_dir = config_dir
        self._cache: dict[str, ExperimentConfig] = {}

    def load_from_file(self, config_path: Path | str) -> ExperimentConfig:
        """Load configuration from a YAML file.

        Args:
            config_path: Path to the configuration file.

        Returns:
            Parsed ExperimentConfig object.

        Raises:
            FileNotFoundError: If config file doesn't exist.
            ConfigurationError: If config is malformed or invalid.
        """
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(config_path) as f:
            text = f.read()

        return parse_config(text, source=str(config_path))

    def load_named(self, name: str) -> ExperimentConfig:
        """Load a shipped configuration by file stem.

        Raises:
            FileNotFoundError: If no config with that stem exists.
        """
        if name in self._cache:
            return self._cache[name]

        for suffix in CONFIG_SUFFIXES:
            config_path = self.config_dir / f"{name}{suffix}"
            if config_path.exists():
                config = self.load_from_file(config_path)
                self._cache[name] = config
                return config

        raise FileNotFoundError(
            f"No config named '{name}'. Expected at: {self.config_dir / (name + CONFIG_SUFFIXES[0])}"
        )

    def list_configs(self) -> list[str]:
        """List all shipped experiment configurations.

        Returns:
            Sorted config stems.
        """
        if not self.config_dir.exists():
            return []
        names = {p.stem for suffix in CONFIG_SUFFIXES for p in self.config_dir.glob(f"*{suffix}")}
        return sorted(names)

    def clear_cache(self) -> None:
        """Clear the configuration cache."""
        self._cache.clear()

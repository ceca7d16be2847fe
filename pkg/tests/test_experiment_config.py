"""Tests for experiment configuration."""

from pathlib import Path

import pytest

from wavelab.errors import ConfigurationError
from wavelab.experiment_config import (
    BATTERY_ITEMS,
    ConfigLoader,
    ExperimentConfig,
    config_hash,
    dump_config,
    parse_config,
)
from wavelab.radial import BlowupFamily, GaussianBump

SHIPPED_CONFIGS = Path(__file__).parent.parent / "configs"


class TestExperimentConfig:
    """Tests for the ExperimentConfig schema."""

    def test_defaults(self):
        """Test the default experiment."""
        config = ExperimentConfig()
        assert config.gamma == 2.0
        assert config.data.family == "blowup"
        assert config.grid.dr == 0.125
        assert config.sweep.eps_list == [1.2, 1.0, 0.9, 0.8, 0.7]
        assert list(config.verify.battery) == list(BATTERY_ITEMS)
        assert config.verify.falsification is True

    def test_family_and_grid(self, blowup_config_text: str):
        """Test that the data section builds its family and grid."""
        config = parse_config(blowup_config_text)
        assert config.family == BlowupFamily(1.0, 1.5)
        grid = config.build_grid()
        assert grid.dr == 0.25
        assert grid.t_max == pytest.approx(4.0)
        assert grid.r_max == pytest.approx(8.0)

    def test_gaussian_family(self, zero_config_text: str):
        """Test the Gaussian data section."""
        config = parse_config(zero_config_text)
        assert config.family == GaussianBump(0.0, 1.0)
        assert config.solve.eps == 0.0

    def test_gamma_range(self):
        """Test that gamma outside (0, 3) is refused."""
        with pytest.raises(ConfigurationError, match="gamma"):
            parse_config("gamma: 3.0")

    def test_eps_list_must_decrease(self):
        """Test that sweep eps values must be strictly decreasing."""
        with pytest.raises(ConfigurationError, match="strictly decreasing"):
            parse_config("sweep:\n  eps_list: [0.5, 0.7]")

    def test_unknown_battery_item(self):
        """Test that the battery only accepts known items."""
        with pytest.raises(ConfigurationError):
            parse_config("verify:\n  battery: [\"no_such_item\"]")

    def test_unknown_key(self):
        """Test that misspelled keys are refused."""
        with pytest.raises(ConfigurationError):
            parse_config("grid:\n  dx: 0.1")

    def test_step_must_not_exceed_horizon(self):
        """Test the dr <= t_max cross-check."""
        with pytest.raises(ConfigurationError, match="dr"):
            parse_config("grid:\n  dr: 2.0\n  t_max: 1.0")

    def test_negative_amplitude_for_blowup(self):
        """Test that blow-up data needs B > 0."""
        with pytest.raises(ConfigurationError):
            parse_config("data:\n  family: blowup\n  amplitude: -1.0")


class TestParsing:
    """Tests for YAML parsing, dumping and hashing."""

    def test_empty_document(self):
        """Test that an empty document gives the defaults."""
        assert parse_config("") == ExperimentConfig()

    def test_malformed_yaml(self):
        """Test that malformed YAML is a configuration error."""
        with pytest.raises(ConfigurationError, match="malformed"):
            parse_config("gamma: [2.0", source="bad.yaml")

    def test_top_level_must_be_mapping(self):
        """Test that a list document is refused."""
        with pytest.raises(ConfigurationError, match="mapping"):
            parse_config("- 1\n- 2")

    def test_dump_round_trip(self, blowup_config_text: str):
        """Test that the canonical dump parses back to the same config."""
        config = parse_config(blowup_config_text)
        assert parse_config(dump_config(config)) == config

    def test_hash_is_stable(self, blowup_config_text: str):
        """Test that equal configs hash equally and changes alter the hash."""
        first = parse_config(blowup_config_text)
        second = parse_config(blowup_config_text)
        assert config_hash(first) == config_hash(second)
        assert len(config_hash(first)) == 12
        changed = first.model_copy(update={"seed": 4})
        assert config_hash(changed) != config_hash(first)


class TestConfigLoader:
    """Tests for ConfigLoader."""

    def test_load_from_file(self, tmp_path: Path, blowup_config_text: str):
        """Test loading config from YAML file."""
        config_file = tmp_path / "small.yaml"
        config_file.write_text(blowup_config_text)

        config = ConfigLoader(tmp_path).load_from_file(config_file)

        assert config.name == "small_blowup"
        assert config.seed == 3

    def test_load_from_file_not_found(self, tmp_path: Path):
        """Test error when the file does not exist."""
        with pytest.raises(FileNotFoundError):
            ConfigLoader(tmp_path).load_from_file(tmp_path / "missing.yaml")

    def test_load_named(self, tmp_path: Path, blowup_config_text: str):
        """Test loading by stem, with caching."""
        (tmp_path / "small.yml").write_text(blowup_config_text)
        loader = ConfigLoader(tmp_path)

        first = loader.load_named("small")
        assert loader.load_named("small") is first
        loader.clear_cache()
        assert loader.load_named("small") is not first

    def test_load_named_not_found(self, tmp_path: Path):
        """Test error when no config has the stem."""
        with pytest.raises(FileNotFoundError):
            ConfigLoader(tmp_path).load_named("missing")

    def test_list_configs(self, tmp_path: Path):
        """Test listing config stems across suffixes."""
        (tmp_path / "b.yaml").write_text("")
        (tmp_path / "a.yml").write_text("")
        (tmp_path / "notes.txt").write_text("")
        assert ConfigLoader(tmp_path).list_configs() == ["a", "b"]

    def test_list_configs_missing_dir(self, tmp_path: Path):
        """Test that a missing directory lists nothing."""
        assert ConfigLoader(tmp_path / "nope").list_configs() == []

    def test_shipped_configs_are_valid(self):
        """Test that every config in configs/ validates."""
        loader = ConfigLoader(SHIPPED_CONFIGS)
        names = loader.list_configs()
        assert "example" in names
        for name in names:
            assert isinstance(loader.load_named(name), ExperimentConfig)

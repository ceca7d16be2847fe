"""Tests for the command line."""

import json

import pytest
from typer.testing import CliRunner

from wavelab import __version__
from wavelab.main import EXIT_BAD_CONFIG, EXIT_OK, app

runner = CliRunner()


@pytest.fixture(autouse=True)
def quiet_settings(monkeypatch, tmp_path):
    """Keep CLI runs quiet and their default outputs inside tmp_path."""
    monkeypatch.setenv("WAVELAB_LOG_LEVEL", "WARNING")
    monkeypatch.setenv("WAVELAB_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("WAVELAB_WORKERS", "1")


class TestCli:
    """Tests for the wavelab commands."""

    def test_version(self):
        """Test --version."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_config_validate(self, write_config, blowup_config_text):
        """Test validating a good config."""
        path = write_config(blowup_config_text)
        result = runner.invoke(app, ["config", "validate", str(path)])
        assert result.exit_code == EXIT_OK
        assert "Config valid: small_blowup" in result.output

    def test_config_validate_malformed(self, write_config):
        """Test that malformed YAML exits with the bad-config code."""
        path = write_config("gamma: [2.0", name="bad.yaml")
        result = runner.invoke(app, ["config", "validate", str(path)])
        assert result.exit_code == EXIT_BAD_CONFIG
        assert "Config validation failed" in result.output

    def test_config_validate_missing_file(self, tmp_path):
        """Test that a missing file exits with the bad-config code."""
        result = runner.invoke(app, ["config", "validate", str(tmp_path / "missing.yaml")])
        assert result.exit_code == EXIT_BAD_CONFIG

    def test_config_show_canonical(self, write_config, blowup_config_text):
        """Test printing a config in canonical form."""
        path = write_config(blowup_config_text)
        result = runner.invoke(app, ["config", "show", str(path)])
        assert result.exit_code == EXIT_OK
        assert "small_blowup" in result.output

    def test_blowup_seq(self, tmp_path):
        """Test that the ladder files are written and the recursion holds."""
        out = tmp_path / "ladder"
        result = runner.invoke(app, ["blowup-seq", "--j-max", "5", "-o", str(out)])
        assert result.exit_code == EXIT_OK
        assert "recursion holds" in result.output
        report = json.loads((out / "ladder.json").read_text())
        assert report["recursion_holds"] is True
        assert report["j_max"] == 5
        rows = [line for line in (out / "ladder.csv").read_text().splitlines() if not line.startswith("#")]
        assert rows[0] == "j,log_C_j,a_j,l_j,S_j"
        assert len(rows) == 6

    def test_blowup_seq_bad_eps(self, tmp_path):
        """Test that eps <= 0 is refused."""
        result = runner.invoke(app, ["blowup-seq", "--eps", "0", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_BAD_CONFIG

    def test_verify_empty_battery(self, write_config):
        """Test that an empty battery exits cleanly."""
        path = write_config("verify:\n  battery: []")
        result = runner.invoke(app, ["verify", "-c", str(path)])
        assert result.exit_code == EXIT_OK
        assert "nothing to verify" in result.output

    def test_verify_selected_items(self, write_config, tmp_path):
        """Test running selected items and writing the summary."""
        path = write_config("verify:\n  ladder_j_max: 20")
        out = tmp_path / "verify"
        result = runner.invoke(
            app, ["verify", "-c", str(path), "-i", "recursion", "-i", "recursion_corrupted_control", "-o", str(out)]
        )
        assert result.exit_code == EXIT_OK
        summary = json.loads((out / "verify.json").read_text())
        assert summary["total"] == 2
        assert summary["all_as_expected"] is True

    def test_verify_unknown_item(self, write_config):
        """Test that an unknown battery item is a configuration error."""
        path = write_config("verify:\n  battery: []")
        result = runner.invoke(app, ["verify", "-c", str(path), "-i", "no_such_item"])
        assert result.exit_code == EXIT_BAD_CONFIG

    def test_solve_zero_data(self, write_config, zero_config_text, tmp_path):
        """Test that solving zero data writes the field, history and lifespan."""
        path = write_config(zero_config_text)
        out = tmp_path / "solve"
        result = runner.invoke(app, ["solve", "-c", str(path), "-o", str(out)])
        assert result.exit_code == EXIT_OK
        assert (out / "field.npz").exists()
        assert (out / "x_norm_history.csv").exists()
        report = json.loads((out / "lifespan.json").read_text())
        assert report["provenance"]["config_name"] == "zero"
        assert report["t_final"] == pytest.approx(1.75)

    def test_solve_writes_data_profiles(self, write_config, blowup_config_text, tmp_path):
        """Test that the initial data profiles are written below the provenance block."""
        path = write_config(blowup_config_text)
        out = tmp_path / "solve"
        result = runner.invoke(app, ["solve", "-c", str(path), "-o", str(out)])
        assert result.exit_code == EXIT_OK
        lines = (out / "u1.csv").read_text().splitlines()
        assert '# config_name: "small_blowup"' in lines
        assert "# tail: [1.0, 2.5, 1.0]" in lines
        body = lines[lines.index("lambda,value") + 1 :]
        lam, value = (float(v) for v in body[0].split(","))
        assert (lam, value) == (0.0, 1.0)
        assert (out / "u0.csv").exists()

    def test_solve_missing_config(self, tmp_path):
        """Test that a missing config exits with the bad-config code."""
        result = runner.invoke(app, ["solve", "-c", str(tmp_path / "missing.yaml")])
        assert result.exit_code == EXIT_BAD_CONFIG


class TestCliSolverErrors:
    """Tests for solver-side configuration errors surfacing as exit code 2."""

    def test_sweep_non_integrable_tail(self, write_config, tmp_path):
        """Test that a sweep over data with a non-integrable potential tail exits with the bad-config code."""
        path = write_config(
            """
name: "slow_tail"
gamma: 2.0
data:
  family: "blowup"
  kappa: 0.4
grid:
  dr: 0.5
sweep:
  eps_list: [1.0, 0.5]
  horizon:
    t_cap: 4.0
    min_t_max: 2.0
"""
        )
        result = runner.invoke(app, ["lifespan-sweep", "-c", str(path), "-o", str(tmp_path / "sweep")])
        assert result.exit_code == EXIT_BAD_CONFIG
        assert "non-integrable" in result.output

    def test_persistence_value_cap_below_data(self, write_config, tmp_path):
        """Test that a blow-up cap below the data size exits with the bad-config code."""
        path = write_config(
            """
name: "capped"
gamma: 2.5
data:
  family: "gaussian"
  kappa: 1.25
solve:
  value_cap: 0.01
persistence:
  eps_list: [0.1]
  horizon: 2.0
  dr: 0.5
"""
        )
        result = runner.invoke(app, ["global-persistence", "-c", str(path), "-o", str(tmp_path / "persist")])
        assert result.exit_code == EXIT_BAD_CONFIG
        assert "value_cap" in result.output


class TestCliLogging:
    """Tests for logging set up by the top-level callback."""

    def test_callback_opens_log_file(self, monkeypatch, tmp_path):
        """Test that any command writes the per-invocation log file."""
        monkeypatch.setenv("WAVELAB_LOG_DIR", str(tmp_path / "logs"))
        result = runner.invoke(app, ["blowup-seq", "--j-max", "3", "-o", str(tmp_path / "ladder")])
        assert result.exit_code == EXIT_OK
        assert list((tmp_path / "logs").glob("wavelab_*.log"))

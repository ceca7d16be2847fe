"""Tests for lifespan fits and result files."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from wavelab import __version__
from wavelab.blowup import theoretical_slope
from wavelab.errors import InsufficientDataError
from wavelab.evolution import LifespanEstimate, SpaceTimeField, TerminationReason
from wavelab.experiment_config import ExperimentConfig, config_hash, parse_config
from wavelab.results import Provenance, ResultWriter
from wavelab.sweep import compare_models, fit_lifespan, grid_convergence


def synthetic_estimate(eps: float, slope: float = 1.5, intercept: float = 2.0) -> LifespanEstimate:
    """A bracket centred on exp(slope / eps^2 + intercept)."""
    T = math.exp(slope / eps**2 + intercept)
    return LifespanEstimate(eps, T - 0.1, T + 0.1, TerminationReason.NORM_THRESHOLD, 2.0 * T)


@pytest.fixture
def sweep_estimates() -> list[LifespanEstimate]:
    return [synthetic_estimate(eps) for eps in (1.2, 1.0, 0.9, 0.8, 0.7)]


class TestFitLifespan:
    """Tests for fit_lifespan."""

    def test_recovers_slope(self, sweep_estimates):
        """Test that exact data gives the slope, the intercept and R^2 = 1."""
        fit = fit_lifespan(sweep_estimates)
        assert fit.n == 5
        assert fit.slope == pytest.approx(1.5, rel=1e-9)
        assert fit.intercept == pytest.approx(2.0, rel=1e-8)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.success
        assert fit.predict(0.9) == pytest.approx(math.log(sweep_estimates[2].T))

    def test_capped_entries_are_skipped(self, sweep_estimates):
        """Test that horizon-limited entries do not enter the fit."""
        capped = LifespanEstimate(0.5, 63.75, 64.0, TerminationReason.HORIZON_REACHED, 64.0)
        fit = fit_lifespan([*sweep_estimates, capped])
        assert fit.n == 5

    def test_too_few_points(self, sweep_estimates):
        """Test that fewer than four uncapped entries cannot be fitted."""
        with pytest.raises(InsufficientDataError, match="increase horizon"):
            fit_lifespan(sweep_estimates[:3])

    def test_single_eps(self):
        """Test that entries sharing one eps are refused."""
        estimates = [synthetic_estimate(1.0) for _ in range(4)]
        with pytest.raises(InsufficientDataError, match="distinct"):
            fit_lifespan(estimates)

    def test_to_dict(self, sweep_estimates):
        """Test the serialized fit."""
        data = fit_lifespan(sweep_estimates, power=1).to_dict()
        assert data["model"] == "eps^-1"
        assert len(data["points"]) == 5


class TestCompareModels:
    """Tests for compare_models."""

    def test_primary_model_preferred(self, sweep_estimates):
        """Test that eps^-2 data prefers the eps^-2 model."""
        comparison = compare_models(sweep_estimates)
        assert comparison.primary_preferred
        assert comparison.theoretical_slope is None
        assert comparison.slope_ratio is None

    def test_slope_ratio(self, sweep_estimates):
        """Test the ratio against the predicted slope 2 F^(-2/3)."""
        comparison = compare_models(sweep_estimates, amplitude=100.0)
        assert comparison.theoretical_slope == pytest.approx(theoretical_slope(100.0))
        assert comparison.slope_ratio == pytest.approx(1.5 / theoretical_slope(100.0), rel=1e-9)
        assert comparison.to_dict()["primary_preferred"] is True


class TestProvenance:
    """Tests for provenance headers."""

    def test_for_config(self, small_grid):
        """Test that provenance carries the config hash, seed, version and grid."""
        config = parse_config("name: demo\nseed: 5")
        provenance = Provenance.for_config(config, small_grid)
        data = provenance.to_dict()
        assert data["config_hash"] == config_hash(config)
        assert data["config_name"] == "demo"
        assert data["seed"] == 5
        assert data["version"] == __version__
        assert data["dr"] == 0.25

    def test_seed_override(self):
        """Test that an explicit seed wins over the config seed."""
        assert Provenance.for_config(ExperimentConfig(seed=1), seed=9).seed == 9


class TestResultWriter:
    """Tests for ResultWriter."""

    @pytest.fixture
    def writer(self, tmp_path: Path) -> ResultWriter:
        return ResultWriter(tmp_path / "out", Provenance.for_config(ExperimentConfig(name="demo", seed=2)))

    def test_write_csv(self, writer):
        """Test the provenance block followed by a header row."""
        path = writer.write_csv("rows.csv", [{"eps": 1.0, "T": 3.5}, {"eps": 0.5, "T": 9.0}])
        lines = path.read_text().splitlines()
        comments = [line for line in lines if line.startswith("# ")]
        assert '# config_name: "demo"' in comments
        assert "# seed: 2" in comments
        body = lines[len(comments):]
        assert body == ["eps,T", "1.0,3.5", "0.5,9.0"]
        assert writer.written == [path]

    def test_write_csv_with_columns(self, writer):
        """Test that missing columns are written empty."""
        path = writer.write_csv("rows.csv", [{"a": 1}], columns=["a", "b"])
        assert path.read_text().splitlines()[-1] == "1,"

    def test_write_json(self, writer):
        """Test the provenance object and null for non-finite floats."""
        path = writer.write_json("report.json", {"T": math.inf, "values": [1.0, math.nan], "ok": True})
        document = json.loads(path.read_text())
        assert document["provenance"]["config_name"] == "demo"
        assert document["T"] is None
        assert document["values"] == [1.0, None]
        assert document["ok"] is True

    def test_deterministic_output(self, tmp_path):
        """Test that identical inputs produce identical bytes."""
        provenance = Provenance.for_config(ExperimentConfig(seed=2))
        first = ResultWriter(tmp_path / "a", provenance).write_json("r.json", {"x": 1.0})
        second = ResultWriter(tmp_path / "b", provenance).write_json("r.json", {"x": 1.0})
        assert first.read_bytes() == second.read_bytes()

    def test_write_field(self, writer, small_grid):
        """Test that a written field loads back with its values."""
        field = SpaceTimeField.from_function(small_grid, lambda r, t: np.exp(-r) * t)
        path = writer.write_field("field", field)
        assert path.suffix == ".npz"
        restored = SpaceTimeField.load(path)
        np.testing.assert_array_equal(restored.values, field.values)


class TestGridConvergence:
    """Tests for grid_convergence."""

    def test_stable_when_shift_is_below_width(self):
        """Test that T_high moving by less than dr is stable."""
        coarse = [LifespanEstimate(1.0, 4.0, 4.25, TerminationReason.NORM_THRESHOLD, 16.0)]
        fine = [LifespanEstimate(1.0, 4.0, 4.125, TerminationReason.NORM_THRESHOLD, 16.0)]
        (check,) = grid_convergence(coarse, fine)
        assert check.shift == pytest.approx(0.125)
        assert check.stable
        assert check.to_row()["stable"] is True

    def test_unstable_when_bracket_moves(self):
        """Test that a shift of a whole bracket is flagged."""
        coarse = [LifespanEstimate(1.0, 4.0, 4.25, TerminationReason.NORM_THRESHOLD, 16.0)]
        fine = [LifespanEstimate(1.0, 4.5, 4.625, TerminationReason.NORM_THRESHOLD, 16.0)]
        assert not grid_convergence(coarse, fine)[0].stable

    def test_eps_lists_must_match(self):
        """Test that sweeps over different eps values cannot be paired."""
        coarse = [LifespanEstimate(1.0, 4.0, 4.25, TerminationReason.NORM_THRESHOLD, 16.0)]
        fine = [LifespanEstimate(0.9, 4.0, 4.125, TerminationReason.NORM_THRESHOLD, 16.0)]
        with pytest.raises(ValueError):
            grid_convergence(coarse, fine)

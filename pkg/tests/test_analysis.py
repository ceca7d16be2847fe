"""Tests for weights, norms, sample sets and the bound verifiers."""

import math

import numpy as np
import pytest

from wavelab.analysis import (
    IntervalEstimate,
    SampleSet,
    ScalingReport,
    WeightSpec,
    exact_weight_field,
    homogeneous_y_norm,
    integral_closed_form,
    integral_lhs,
    lemma_integral_oracle,
    log_loss_factor,
    rhs_shape,
    scaling_check,
    verify_duhamel_bound,
    verify_potential_bound,
    x_norm,
    x_norm_history,
    y_norm,
)
from wavelab.analysis import scaling
from wavelab.analysis.samples import SampleRegime
from wavelab.convolution import Gamma
from wavelab.errors import ConfigurationError, DomainError, SequencingError
from wavelab.radial import BlowupFamily, GaussianBump, Grid, build_on_grid, data_mesh


class TestWeightSpec:
    """Tests for light-cone weights."""

    def test_x_norm_weight(self):
        """Test <t+r> <t-r>^((3-gamma)/2)."""
        weight = WeightSpec.x_norm(2.0)
        assert (weight.a, weight.b, weight.l) == (1.0, 0.5, 0)
        assert weight(0.0, 0.0) == pytest.approx(1.0)
        assert weight(1.0, 2.0) == pytest.approx(math.sqrt(10.0) * 2.0**0.25)

    def test_log_factor(self):
        """Test the (1 + log<t+r>)^(-l) factor and its removal."""
        weight = WeightSpec.potential_critical()
        plus = math.sqrt(2.0)
        assert weight(0.0, 1.0) == pytest.approx(plus**1.75 * plus**0.25 / (1.0 + math.log(plus)))
        assert weight.without_log()(0.0, 1.0) == pytest.approx(plus**2.0)
        assert weight.without_log().name == "potential_critical_no_log"

    def test_supercritical_preset(self):
        """Test the 2 < gamma < 3 potential weight exponents."""
        weight = WeightSpec.potential_supercritical(2.5)
        assert weight.a == pytest.approx(1.875)
        assert weight.b == pytest.approx(0.125)

    def test_small_a_raised_b_weight_is_dominated(self):
        """Test that <t+r>^1.7 <t-r>^0.3 / log stays below the critical weight, so it cannot serve as a control."""
        r, t = np.meshgrid(np.linspace(0.0, 400.0, 161), np.linspace(0.0, 400.0, 161))
        dominated = WeightSpec(1.7, 0.3, 1)(r, t)
        critical = WeightSpec.potential_critical()(r, t)
        assert np.all(dominated <= critical * (1.0 + 1e-12))
        assert np.all(WeightSpec.potential_weakened()(r, t) >= critical)

    def test_rejects_negative_log_power(self):
        """Test that l < 0 is refused."""
        with pytest.raises(DomainError):
            WeightSpec(1.0, 1.0, -1)


class TestNorms:
    """Tests for the X and Y norms."""

    def test_exact_weight_field_has_norm_a(self, small_grid):
        """Test that A <t+r>^-1 <t-r>^-(3-gamma)/2 has X norm A."""
        for gamma in (2.0, 2.5):
            field = exact_weight_field(small_grid, gamma, amplitude=3.0)
            assert x_norm(field, gamma) == pytest.approx(3.0, rel=1e-12)

    def test_history_is_running_max(self, solved_blowup):
        """Test that the history is non-decreasing and ends at the full norm."""
        history = x_norm_history(solved_blowup, 2.0)
        assert history.size == solved_blowup.finalized_count
        assert np.all(np.diff(history) >= 0.0)
        assert history[-1] == pytest.approx(x_norm(solved_blowup, 2.0))

    def test_norm_up_to_time(self, small_grid):
        """Test that x_norm(T) reads only slabs with t < T."""
        field = exact_weight_field(small_grid, 2.0)
        assert x_norm(field, 2.0, T=1.0) == pytest.approx(1.0)
        partial = type(field).from_values(small_grid, field.values[:2])
        with pytest.raises(SequencingError):
            x_norm(partial, 2.0, T=2.0)

    def test_y_norm_of_blowup_data(self, blowup_data):
        """Test that the blow-up family has Y norm B."""
        assert y_norm(blowup_data, 1.5) == pytest.approx(1.0, rel=1e-9)
        assert homogeneous_y_norm(blowup_data, 1.5) == pytest.approx(1.0, rel=1e-9)

    def test_y_norm_of_zero_data(self, small_grid):
        """Test that zero data has zero norm."""
        data = build_on_grid(GaussianBump(0.0, 1.0), small_grid)
        assert y_norm(data, 1.5) == 0.0


class TestSampleSet:
    """Tests for sample generation."""

    def test_stratified_regimes(self):
        """Test that every regime is populated and points stay in the box."""
        samples = SampleSet.stratified(50.0, 30, seed=4)
        assert set(samples.regime) == {r.value for r in SampleRegime}
        assert np.all(samples.extent <= 50.0)

    def test_reproducible(self):
        """Test that a seed fixes the sample set."""
        first = SampleSet.stratified(10.0, 5, seed=9)
        second = SampleSet.stratified(10.0, 5, seed=9)
        np.testing.assert_array_equal(first.r, second.r)
        np.testing.assert_array_equal(first.t, second.t)

    def test_on_grid_returns_nodes(self, small_grid):
        """Test that grid samples are grid nodes."""
        samples = SampleSet.on_grid(small_grid, 5, seed=0)
        assert len(samples) > 0
        for r, t in zip(samples.r, samples.t):
            small_grid.r_index(float(r))
            small_grid.t_index(float(t))

    def test_rejects_negative_points(self):
        """Test that points outside [0, inf)^2 are refused."""
        with pytest.raises(DomainError):
            SampleSet(np.array([-1.0]), np.array([1.0]), np.array(["interior"]))


class TestIntervalEstimates:
    """Tests for the quadrature oracles of the interval integrals."""

    def test_reciprocal_closed_form(self):
        """Test quadrature against asinh(t+r) - asinh|t-r|."""
        lhs = integral_lhs(IntervalEstimate.RECIPROCAL, 2.0, 5.0)
        assert lhs == pytest.approx(integral_closed_form(IntervalEstimate.RECIPROCAL, 2.0, 5.0), rel=1e-10)

    def test_lower_estimate_has_no_violations(self):
        """Test the explicit lower bound with random kappa per point."""
        samples = SampleSet.uniform(50.0, 2000, seed=1)
        report = lemma_integral_oracle("lower_power", {"kappa_max": 3.0, "seed": 2}, samples)
        assert report.mode == "pointwise"
        assert report.violations == 0
        assert report.passed
        assert report.notes["closed_form_rel_error"] < 1e-6

    def test_lower_estimate_rhs(self):
        """Test the explicit constant 2 / max{kappa, 1}."""
        assert rhs_shape(IntervalEstimate.LOWER_POWER, 1.0, 3.0, kappa=0.5) == pytest.approx(
            2.0 * 1.0 / (4.0 * 2.0**0.5)
        )
        assert rhs_shape(IntervalEstimate.LOWER_POWER, 1.0, 3.0, kappa=2.0) == pytest.approx(1.0 / (4.0 * 4.0))

    def test_power_estimate_ratio_is_bounded(self):
        """Test that the power estimate has a moderate constant."""
        samples = SampleSet.stratified(200.0, 60, seed=0)
        report = lemma_integral_oracle("power", {"kappa": 1.5}, samples, base_horizon=25.0)
        assert 0.0 < report.sup_ratio < 10.0

    def test_strengthened_power_estimate_fails(self):
        """Test that raising the <t-r> exponent makes the ratio grow."""
        samples = SampleSet.stratified(200.0, 60, seed=0)
        report = lemma_integral_oracle("power", {"kappa": 1.5, "shift": 1.0}, samples, base_horizon=25.0,
                                       expect_pass=False)
        assert not report.passed
        assert report.as_expected

    def test_parameter_validation(self):
        """Test out-of-range parameters."""
        samples = SampleSet.uniform(10.0, 10, seed=0)
        with pytest.raises(DomainError):
            lemma_integral_oracle("reciprocal", {"delta": 0.0}, samples)
        with pytest.raises(DomainError):
            lemma_integral_oracle("power", {}, samples)
        with pytest.raises(DomainError):
            integral_lhs(IntervalEstimate.LOWER_POWER, 2.0, 1.0)


class TestBoundVerifiers:
    """Tests for the potential and Duhamel bound verifiers."""

    def test_log_loss_factor(self):
        """Test D(T) = 1 + log(3 + T) at gamma = 2 only."""
        assert log_loss_factor(Gamma(2.0), 1.0) == pytest.approx(1.0 + math.log(4.0))
        assert log_loss_factor(Gamma(2.0), 1.0, with_log=False) == 1.0
        assert log_loss_factor(Gamma(2.5), 1.0) == 1.0

    def test_zero_field_passes_trivially(self, small_grid):
        """Test that a field with zero norm gives an empty, passing report."""
        field = exact_weight_field(small_grid, 2.0, amplitude=0.0)
        report = verify_potential_bound(field, 2.0, WeightSpec.potential_critical(), base_horizon=1.0)
        assert report.sup_ratio == 0.0
        assert report.passed

    def test_potential_ratio_on_exact_field(self):
        """Test that the critical potential bound has a finite positive ratio on the exact field."""
        grid = Grid.build(0.5, 8.0, 8.0)
        field = exact_weight_field(grid, 2.0)
        report = verify_potential_bound(field, 2.0, WeightSpec.potential_critical(), base_horizon=2.0,
                                        doublings=2, per_regime=10)
        assert report.n_samples > 0
        assert 0.0 < report.sup_ratio < math.inf
        assert report.notes["x_norm"] == pytest.approx(1.0)

    def test_duhamel_needs_one_grid(self, small_grid):
        """Test that fields on different grids are refused."""
        u = exact_weight_field(small_grid, 2.0)
        other = exact_weight_field(Grid.build(0.5, 4.0, 4.0), 2.0)
        with pytest.raises(ConfigurationError):
            verify_duhamel_bound(u, u, other, 2.0, [1.0, 2.0])

    def test_duhamel_ratio_on_exact_field(self):
        """Test the trilinear Duhamel estimate on the exact weight field."""
        grid = Grid.build(0.25, 4.0, 4.0)
        u = exact_weight_field(grid, 2.0)
        report = verify_duhamel_bound(u, u, u, 2.0, [1.0, 2.0, 4.0])
        assert len(report.trend) == 3
        assert all(value > 0.0 for value in report.trend)

    def test_potential_ratio_is_sign_invariant(self):
        """Test that u -> -u leaves the potential bound ratios unchanged."""
        field = exact_weight_field(Grid.build(0.5, 8.0, 8.0), 2.0)
        kwargs = dict(base_horizon=2.0, doublings=2, per_regime=10, seed=3)
        plain = verify_potential_bound(field, 2.0, WeightSpec.potential_critical(), **kwargs)
        flipped = verify_potential_bound(field.negated(), 2.0, WeightSpec.potential_critical(), **kwargs)
        assert flipped.sup_ratio == pytest.approx(plain.sup_ratio, rel=1e-12)
        assert flipped.trend == pytest.approx(plain.trend, rel=1e-12)

    def test_duhamel_ratio_is_sign_invariant(self):
        """Test that u -> -u in all three slots leaves the Duhamel ratios unchanged."""
        u = exact_weight_field(Grid.build(0.25, 4.0, 4.0), 2.0)
        v = u.negated()
        plain = verify_duhamel_bound(u, u, u, 2.0, [1.0, 2.0, 4.0])
        flipped = verify_duhamel_bound(v, v, v, 2.0, [1.0, 2.0, 4.0])
        assert flipped.trend == pytest.approx(plain.trend, rel=1e-12)

    def test_duhamel_log_loss_slows_growth(self):
        """Test that dividing by D(T) slows the trend and that the no-log control fails as designed."""
        u = exact_weight_field(Grid.build(1.0, 100.0, support_radius=100.0), 2.0)
        with_log = verify_duhamel_bound(u, u, u, 2.0, [10.0, 100.0])
        control = verify_duhamel_bound(u, u, u, 2.0, [10.0, 100.0], with_log=False, expect_pass=False)
        assert control.growth > with_log.growth > 1.0
        assert not control.passed
        assert control.as_expected


class TestScaling:
    """Tests for the scaling check."""

    @pytest.fixture
    def family(self):
        return BlowupFamily(1.0, 1.5)

    @pytest.fixture
    def grid(self, family):
        return Grid.build(0.25, 2.0, family.support_radius / 2.0)

    def test_paired_runs_and_norm_identity(self, family, grid):
        """Test that scaled runs agree within the refinement budget and the norm identity holds."""
        report = scaling_check(family, 0.5, 2.0, grid, 2.0)
        assert report.nodes_compared > 0
        assert report.deviation <= report.budget
        assert report.norm_factor_expected == pytest.approx(1.0)
        assert report.norm_identity_error <= 1e-12
        assert report.passed
        assert report.to_dict()["passed"] is True

    def test_wrong_amplitude_rate_fails(self, family, grid, monkeypatch):
        """Test that data rescaled with the wrong power of sigma is caught."""

        def wrong_rate(family, grid, sigma, gamma):
            return family.build(data_mesh(grid) * sigma).rescaled(sigma, 1.0)

        monkeypatch.setattr(scaling, "scaled_data", wrong_rate)
        report = scaling_check(family, 0.5, 2.0, grid, 2.0)
        assert report.deviation > report.budget
        assert not report.passed

    def test_rejects_nonpositive_sigma(self, family, grid):
        """Test that sigma must be positive."""
        with pytest.raises(DomainError):
            scaling_check(family, 0.5, 2.0, grid, 0.0)


class TestScalingReport:
    """Tests for the scaling report verdict."""

    def _report(self, **overrides):
        values = dict(
            sigma=2.0, gamma=2.0, kappa=1.5, deviation=0.01, refinement=0.005, nodes_compared=10,
            norm_factor_expected=1.0, norm_factor_measured=1.0,
        )
        values.update(overrides)
        return ScalingReport(**values)

    def test_budget_from_refinement(self):
        """Test that the budget is a multiple of the refinement difference with a rounding floor."""
        assert self._report().budget == pytest.approx(0.02)
        assert self._report(refinement=0.0).budget == pytest.approx(1e-10)

    def test_verdict(self):
        """Test that deviation, node count and norm identity all gate the verdict."""
        assert self._report().passed
        assert not self._report(deviation=0.03).passed
        assert not self._report(nodes_compared=0).passed
        assert not self._report(norm_factor_measured=1.0 + 1e-9).passed

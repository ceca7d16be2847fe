"""Tests for grids, radial profiles, data families and the free propagator."""

import math

import numpy as np
import pytest

from wavelab.errors import ConfigurationError, DomainError
from wavelab.radial import (
    BlowupFamily,
    CompactBump,
    GaussianBump,
    Grid,
    InitialDataSet,
    RadialProfile,
    TailSpec,
    build_on_grid,
    data_mesh,
    dt_w_operator,
    free_solution,
    free_solution_grid,
    japanese,
    spherical_mean,
    w_operator,
)


class TestGrid:
    """Tests for the characteristic grid."""

    def test_build_covers_domain_of_dependence(self):
        """Test that build() sets r_max = t_max + support radius."""
        grid = Grid.build(0.25, 4.0, 4.0)
        assert grid.dt == grid.dr == 0.25
        assert grid.n_t == 16
        assert grid.r_max == pytest.approx(8.0)
        assert grid.n_r == 32
        assert grid.t[-1] == pytest.approx(3.75)

    def test_build_rounds_horizon_up(self):
        """Test that a horizon between nodes is rounded up to whole steps."""
        grid = Grid.build(0.25, 3.9)
        assert grid.t_max == pytest.approx(4.0)

    def test_rejects_small_truncation_radius(self):
        """Test that r_max below t_max + support radius is refused."""
        with pytest.raises(DomainError, match="domain of dependence"):
            Grid(dr=0.25, t_max=4.0, r_max=6.0, support_radius=4.0)

    def test_rejects_non_positive_step(self):
        """Test that dr must be positive."""
        with pytest.raises(DomainError):
            Grid.build(0.0, 4.0)

    def test_index_snapping(self):
        """Test node lookup and rejection of off-grid values."""
        grid = Grid.build(0.25, 4.0, 4.0)
        assert grid.r_index(1.5) == 6
        assert grid.t_index(3.75) == 15
        with pytest.raises(DomainError):
            grid.t_index(0.3)
        with pytest.raises(DomainError):
            grid.t_index(4.0)

    def test_reliable_mask(self):
        """Test that nodes with t + r beyond r_max are marked unreliable."""
        grid = Grid.build(0.5, 2.0, 1.0)
        mask = grid.reliable_mask()
        assert mask.shape == (grid.n_t, grid.n_r + 1)
        assert mask[0].all()
        assert not mask[-1, -1]


class TestRadialProfile:
    """Tests for sampled radial functions."""

    def test_mesh_must_start_at_origin(self):
        """Test that a mesh not starting at zero is refused."""
        with pytest.raises(DomainError, match="lambda=0"):
            RadialProfile(lam=np.array([0.5, 1.0]), values=np.array([1.0, 1.0]))

    def test_mesh_must_increase(self):
        """Test that a non-increasing mesh is refused."""
        with pytest.raises(DomainError):
            RadialProfile(lam=np.array([0.0, 1.0, 1.0]), values=np.zeros(3))

    def test_antiderivative_of_constant(self, constant_mesh):
        """Test that G(x) = x^2 / 2 for f = 1, between nodes too."""
        profile = RadialProfile(lam=constant_mesh, values=np.ones_like(constant_mesh))
        x = np.array([0.0, 0.3, 1.0, 7.77])
        np.testing.assert_allclose(profile.antiderivative(x), 0.5 * x**2, rtol=1e-13, atol=1e-15)

    def test_tail_beyond_mesh(self):
        """Test that evaluation past the mesh uses the declared tail."""
        lam = np.linspace(0.0, 10.0, 101)
        tail = TailSpec(2.0, 3.0)
        profile = RadialProfile.from_function(lambda x: tail.value(x), lam, tail=tail)
        assert profile(20.0) == pytest.approx(2.0 * japanese(20.0) ** -3.0)
        assert profile.sup_abs() == pytest.approx(2.0)

    def test_zero_profile(self, constant_mesh):
        """Test the zero profile."""
        assert RadialProfile.zeros(constant_mesh).is_zero

    def test_tail_exponent_must_be_positive(self):
        """Test that a non-decaying tail is refused."""
        with pytest.raises(DomainError):
            TailSpec(1.0, 0.0)

    def test_weighted_sup_at_critical_power(self):
        """Test that the weighted tail sup of <x>^p * A <x>^-p is A."""
        assert TailSpec(3.0, 2.5).weighted_sup(10.0, 2.5) == pytest.approx(3.0)
        assert TailSpec(3.0, 2.5).weighted_sup(10.0, 3.0) == math.inf


class TestDataFamilies:
    """Tests for the initial data families."""

    def test_blowup_family(self, blowup_data):
        """Test u0 = 0 and u1 = B <x>^-(kappa+1)."""
        assert blowup_data.u0.is_zero
        assert blowup_data.u1(0.0) == pytest.approx(1.0)
        assert blowup_data.u1(2.0) == pytest.approx(5.0**-1.25)
        assert blowup_data.params == {"B": 1.0, "kappa": 1.5}
        assert blowup_data.tail_exponent == pytest.approx(2.5)

    def test_blowup_amplitude_must_be_positive(self):
        """Test that B <= 0 is refused."""
        with pytest.raises(DomainError):
            BlowupFamily(0.0, 1.5)

    def test_data_mesh_covers_cone(self, small_grid):
        """Test that the data mesh reaches r_max + t_max."""
        mesh = data_mesh(small_grid)
        assert mesh[0] == 0.0
        assert mesh[-1] == pytest.approx(small_grid.r_max + small_grid.t_max)

    def test_regime(self, blowup_data):
        """Test the decay regime relative to (5 - gamma)/2."""
        assert blowup_data.regime(2.0) == "critical"
        assert blowup_data.regime(2.5) == "supercritical"
        assert blowup_data.regime(1.0) == "subcritical"

    def test_mismatched_tail_is_refused(self, constant_mesh):
        """Test that a u1 tail inconsistent with kappa is a configuration error."""
        u0 = RadialProfile.zeros(constant_mesh)
        u1 = RadialProfile.from_function(lambda x: japanese(x) ** -4.0, constant_mesh, tail=TailSpec(1.0, 4.0))
        with pytest.raises(ConfigurationError, match="tail exponent"):
            InitialDataSet(u0=u0, u1=u1, kappa=1.5)

    def test_rescaled_data(self, blowup_data):
        """Test sigma^((5-gamma)/2) scaling of u1 at gamma = 2."""
        scaled = blowup_data.rescaled(2.0, 2.0)
        assert scaled.u1(1.0) == pytest.approx(2.0**2.5 * blowup_data.u1(2.0))
        assert scaled.params["sigma"] == 2.0

    def test_compact_and_gaussian_families(self, small_grid):
        """Test the compactly supported and Gaussian bumps."""
        compact = build_on_grid(CompactBump(2.0, 1.0), small_grid)
        assert compact.u0(0.0) == pytest.approx(2.0)
        assert compact.u0(1.5) == 0.0
        gaussian = build_on_grid(GaussianBump(1.0, 1.0), small_grid)
        assert gaussian.u0(1.0) == pytest.approx(math.exp(-1.0))
        assert gaussian.u1.is_zero


class TestPropagator:
    """Tests for spherical means, W and the free solution."""

    def test_w_of_constant_is_t(self, constant_mesh):
        """Test W(1|r,t) = t, including the r = 0 limit."""
        one = RadialProfile(lam=constant_mesh, values=np.ones_like(constant_mesh))
        r = np.array([0.0, 1.0, 2.5, 4.0])
        t = np.full(4, 3.0)
        np.testing.assert_allclose(w_operator(one, r, t), t, rtol=1e-12)

    def test_spherical_mean_of_constant(self, constant_mesh):
        """Test that the spherical mean of 1 is 4 pi for r > 0 and r = 0."""
        one = RadialProfile(lam=constant_mesh, values=np.ones_like(constant_mesh))
        assert spherical_mean(one, 2.0, 3.0) == pytest.approx(4.0 * math.pi)
        assert spherical_mean(one, 0.0, 3.0) == pytest.approx(4.0 * math.pi)

    def test_spherical_mean_needs_positive_radius(self, constant_mesh):
        """Test that rho <= 0 is a domain error."""
        one = RadialProfile(lam=constant_mesh, values=np.ones_like(constant_mesh))
        with pytest.raises(DomainError):
            spherical_mean(one, 1.0, 0.0)

    def test_free_solution_at_origin(self, blowup_data):
        """Test u0(0, t) = eps * t * u1(t) for u0 = 0."""
        value = free_solution(blowup_data, 0.5, 0.0, 2.0)
        assert value == pytest.approx(0.5 * 2.0 * 5.0**-1.25)

    def test_free_solution_zero_eps(self, blowup_data):
        """Test that eps = 0 gives the zero solution."""
        assert free_solution(blowup_data, 0.0, 1.0, 2.0) == 0.0

    def test_free_solution_negative_eps(self, blowup_data):
        """Test that eps < 0 is refused."""
        with pytest.raises(DomainError):
            free_solution(blowup_data, -1.0, 1.0, 2.0)

    def test_free_solution_grid_is_positive(self, blowup_data, small_grid):
        """Test positivity of the free solution for blow-up data after t = 0."""
        values = free_solution_grid(blowup_data, 1.0, small_grid)
        assert values.shape == (small_grid.n_t, small_grid.n_r + 1)
        np.testing.assert_array_equal(values[0], 0.0)
        assert np.all(values[1:] > 0.0)


class TestClosedFormPropagator:
    """Tests for spherical means and W on closed-form radial functions."""

    @pytest.fixture
    def points(self):
        rng = np.random.default_rng(7)
        return rng.uniform(0.05, 5.0, 100), rng.uniform(0.05, 5.0, 100)

    @staticmethod
    def monomial_mean(k: int, r: np.ndarray, rho: np.ndarray) -> np.ndarray:
        """(2 pi / (r rho)) * integral of lambda^(k+1) over [|rho - r|, rho + r]."""
        return 2.0 * math.pi / (r * rho) * ((rho + r) ** (k + 2) - np.abs(rho - r) ** (k + 2)) / (k + 2)

    def test_spherical_mean_of_constant(self, points):
        """Test the mean of b = 1 at random points."""
        r, rho = points
        np.testing.assert_allclose(spherical_mean(np.ones_like, r, rho), 4.0 * math.pi, rtol=1e-8)

    def test_spherical_mean_of_identity(self, points):
        """Test the mean of b = lambda against (2 pi / 3 r rho)((rho + r)^3 - |rho - r|^3)."""
        r, rho = points
        expected = 2.0 * math.pi / (3.0 * r * rho) * ((rho + r) ** 3 - np.abs(rho - r) ** 3)
        np.testing.assert_allclose(spherical_mean(lambda lam: lam, r, rho), expected, rtol=1e-8)

    def test_spherical_mean_of_square(self, points):
        """Test the mean of b = lambda^2 against 4 pi (r^2 + rho^2)."""
        r, rho = points
        expected = 4.0 * math.pi * (r**2 + rho**2)
        np.testing.assert_allclose(spherical_mean(np.square, r, rho), expected, rtol=1e-8)
        assert spherical_mean(np.square, 1.0, 1.0) == pytest.approx(8.0 * math.pi, rel=1e-8)

    def test_cubic_polynomials_are_exact(self, points):
        """Test random polynomials of degree <= 3 against their monomial closed forms."""
        r, rho = points
        coefficients = np.random.default_rng(11).uniform(-2.0, 2.0, 4)
        expected = sum(c * self.monomial_mean(k, r, rho) for k, c in enumerate(coefficients))
        computed = spherical_mean(lambda lam: np.polyval(coefficients[::-1], lam), r, rho)
        np.testing.assert_allclose(computed, expected, rtol=1e-8, atol=1e-12 * np.max(np.abs(expected)))

    def test_spherical_mean_at_origin(self):
        """Test the r = 0 limit 4 pi b(rho)."""
        assert spherical_mean(np.square, 0.0, 3.0) == pytest.approx(36.0 * math.pi)

    def test_w_of_constant(self, points):
        """Test W(1|r,t) = t for a closed-form constant."""
        r, t = points
        np.testing.assert_allclose(w_operator(np.ones_like, r, t), t, rtol=1e-10)

    def test_w_anchor(self):
        """Test W(<lambda>^(-5/2)|2,2) = (1 - 17^(-1/4))/2."""
        value = w_operator(lambda lam: japanese(lam) ** -2.5, 2.0, 2.0)
        assert value == pytest.approx(0.5 * (1.0 - 17.0**-0.25), rel=1e-10)


class TestTimeDerivative:
    """Tests for dt_w_operator."""

    @staticmethod
    def phi(lam):
        return japanese(lam) ** -2.5

    @staticmethod
    def dphi(lam):
        return -2.5 * lam * japanese(lam) ** -4.5

    @pytest.fixture
    def fine_profile(self):
        return RadialProfile.from_function(self.phi, np.linspace(0.0, 20.0, 20001), dfunc=self.dphi)

    def test_matches_difference_quotient(self, fine_profile):
        """Test dW/dt against a central difference of the closed-form W."""
        r = np.array([0.5, 1.0, 2.0, 3.0, 3.0])
        t = np.array([0.5, 1.5, 2.5, 4.0, 1.0])
        h = 1e-4
        expected = (w_operator(self.phi, r, t + h) - w_operator(self.phi, r, t - h)) / (2.0 * h)
        np.testing.assert_allclose(dt_w_operator(fine_profile, r, t), expected, rtol=1e-5)

    def test_origin_limit(self, fine_profile):
        """Test the r = 0 limit phi(t) + t phi'(t)."""
        t = 1.5
        assert dt_w_operator(fine_profile, 0.0, t) == pytest.approx(self.phi(t) + t * self.dphi(t), rel=1e-5)

    def test_initial_time(self, fine_profile):
        """Test that dW/dt at t = 0 returns the profile."""
        assert dt_w_operator(fine_profile, 2.0, 0.0) == pytest.approx(self.phi(2.0), rel=1e-6)

    def test_closed_form_callable(self):
        """Test dW/dt of a callable against the closed form, including the r = 0 limit."""
        r = np.array([0.0, 0.0, 0.5, 2.0, 3.0])
        t = np.array([0.0, 1.5, 1.5, 2.5, 0.0])
        plus, minus = r + t, np.abs(r - t)
        expected = np.where(
            r == 0.0,
            self.phi(t) + t * self.dphi(t),
            (plus * self.phi(plus) + (r - t) * self.phi(minus)) / (2.0 * np.where(r == 0.0, 1.0, r)),
        )
        np.testing.assert_allclose(dt_w_operator(self.phi, r, t), expected, rtol=1e-8)

    def test_callable_origin_of_square(self):
        """Test d/dt [t * t^2] = 3 t^2 at r = 0 for phi = lambda^2."""
        assert dt_w_operator(np.square, 0.0, 2.0) == pytest.approx(12.0, rel=1e-8)


class TestFreeSolutionProperties:
    """Tests for the wave residual, strong Huygens and free decay."""

    @staticmethod
    def residual(dr: float, points: list[tuple[float, float]]) -> float:
        """Largest discrete wave residual of the free solution at the given nodes."""
        mesh = np.linspace(0.0, 10.0, int(round(10.0 / dr)) + 1)
        data = GaussianBump(1.0, 1.0).build(mesh)
        worst = 0.0
        for r, t in points:
            u = {
                (i, j): free_solution(data, 1.0, r + i * dr, t + j * dr)
                for i in (-1, 0, 1)
                for j in (-1, 0, 1)
                if i == 0 or j == 0
            }
            u_tt = (u[0, 1] - 2.0 * u[0, 0] + u[0, -1]) / dr**2
            u_rr = (u[1, 0] - 2.0 * u[0, 0] + u[-1, 0]) / dr**2
            u_r = (u[1, 0] - u[-1, 0]) / (2.0 * dr)
            worst = max(worst, abs(u_tt - u_rr - 2.0 / r * u_r))
        return worst

    def test_wave_residual_converges_at_second_order(self):
        """Test that halving dr divides the residual by about four."""
        points = [(1.0, 2.0), (1.5, 1.0), (2.0, 1.5), (2.5, 3.0)]
        coarse = self.residual(0.125, points)
        fine = self.residual(0.0625, points)
        assert coarse > 0.0
        assert 3.0 < coarse / fine < 5.0

    def test_strong_huygens(self):
        """Test that compact data give a solution that vanishes off the band |t - r| <= R."""
        grid = Grid.build(0.125, 6.0, 1.0)
        data = build_on_grid(CompactBump(1.0, 1.0), grid)
        values = free_solution_grid(data, 1.0, grid)
        tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
        outside = np.abs(tt - rr) > 1.0
        np.testing.assert_array_equal(values[outside], 0.0)
        assert np.any(values[~outside] != 0.0)

    def test_free_decay_is_stable(self):
        """Test that sup <t+r><t-r>^(1/2) |u0| for blow-up data settles as the horizon doubles."""

        def weighted_sup(t_max: float) -> float:
            grid = Grid.build(0.25, t_max, 4.0)
            data = build_on_grid(BlowupFamily(1.0, 1.5), grid)
            values = free_solution_grid(data, 1.0, grid)
            tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
            return float(np.max(japanese(tt + rr) * np.sqrt(japanese(tt - rr)) * np.abs(values)))

        short, long = weighted_sup(64.0), weighted_sup(128.0)
        assert math.isfinite(long)
        assert short <= long
        assert long / short - 1.0 < 0.05

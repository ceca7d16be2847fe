"""Scaling invariance u_sigma(x, t) = sigma^((5-gamma)/2) u(sigma x, sigma t)."""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..convolution.kernel import Gamma, as_gamma
from ..errors import DomainError
from ..evolution.field import SpaceTimeField
from ..evolution.solver import SolverOptions, solve
from ..radial.families import DataFamily, InitialDataSet, data_mesh
from ..radial.grid import Grid
from .norms import homogeneous_y_norm

logger = logging.getLogger(__name__)

# Accepted deviation as a multiple of the dr vs dr/2 refinement difference
REFINEMENT_SAFETY = 4.0
# Budget floor for runs that agree to rounding
ROUNDOFF_FLOOR = 1e-10
NORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ScalingReport:
    """Paired-run deviation on one grid, its refinement budget and the data-norm identity."""

    sigma: float
    gamma: float
    kappa: float
    deviation: float
    refinement: float
    nodes_compared: int
    norm_factor_expected: float
    norm_factor_measured: float

    @property
    def budget(self) -> float:
        return max(REFINEMENT_SAFETY * self.refinement, ROUNDOFF_FLOOR)

    @property
    def norm_identity_error(self) -> float:
        if self.norm_factor_expected == 0.0:
            return abs(self.norm_factor_measured)
        return abs(self.norm_factor_measured / self.norm_factor_expected - 1.0)

    @property
    def passed(self) -> bool:
        return (
            self.nodes_compared > 0
            and self.deviation <= self.budget
            and self.norm_identity_error <= NORM_TOLERANCE
        )

    def to_dict(self) -> dict[str, float | bool]:
        return {
            **asdict(self),
            "budget": self.budget,
            "norm_identity_error": self.norm_identity_error,
            "passed": self.passed,
        }


def scaled_data(family: DataFamily, grid: Grid, sigma: float, gamma: float) -> InitialDataSet:
    """Data of the rescaled problem sampled on the mesh matching a grid."""
    return family.build(data_mesh(grid) * sigma).rescaled(sigma, gamma)


def _relative_gap(field: SpaceTimeField, reference: np.ndarray, mask: np.ndarray, scale: float) -> float:
    count = min(field.finalized_count, reference.shape[0])
    if count == 0 or scale == 0.0:
        return 0.0
    gap = np.abs(field.values[:count] - reference[:count])[mask[:count]]
    return float(np.max(gap)) / scale if gap.size else 0.0


def scaling_check(
    family: DataFamily,
    eps: float,
    gamma: "Gamma | float",
    grid: Grid,
    sigma: float,
    options: SolverOptions | None = None,
) -> ScalingReport:
    """Solve the rescaled problem on a grid and compare with the base run read at (sigma r, sigma t).

    The base run uses the same step on a domain sigma times larger and is read by
    interpolation. Both runs carry their own discretization error, so the deviation
    is judged against the difference between the rescaled runs at dr and dr/2.

    Args:
        family: Base data family.
        eps: Data size.
        gamma: Potential exponent.
        grid: Grid of the rescaled problem.
        sigma: Scaling factor, > 0.
        options: Solver options for every run.

    Returns:
        ScalingReport with the relative deviation over the reliable nodes, the
        refinement difference and the norm identity factors.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    g = as_gamma(gamma)
    power = 0.5 * (5.0 - g.value)

    base_grid = Grid.build(grid.dr, sigma * grid.t_max + grid.dr, sigma * (grid.r_max - grid.t_max))
    base_data = family.build(data_mesh(base_grid))
    base_field, _ = solve(base_data, eps, g, base_grid, options=options)
    scaled_field, _ = solve(scaled_data(family, grid, sigma, g.value), eps, g, grid, options=options)

    tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
    mask = grid.reliable_mask() & (sigma * tt <= base_field.t_final) & (sigma * rr <= base_grid.r_max)
    expected = np.zeros_like(tt)
    if base_field.finalized_count >= 2 and mask.any():
        expected[mask] = sigma**power * base_field.value_at(sigma * rr[mask], sigma * tt[mask])
    scale = float(np.max(np.abs(expected)))
    deviation = _relative_gap(scaled_field, expected, mask, scale)

    fine_grid = Grid(dr=0.5 * grid.dr, t_max=grid.t_max, r_max=grid.r_max, support_radius=grid.support_radius)
    fine_field, _ = solve(scaled_data(family, fine_grid, sigma, g.value), eps, g, fine_grid, options=options)
    count = min(fine_field.finalized_count, 2 * grid.n_t - 1)
    coarse_view = fine_field.values[:count:2, ::2]
    refinement = _relative_gap(scaled_field, coarse_view, mask, scale)

    kappa = base_data.kappa
    base_norm = homogeneous_y_norm(base_data, kappa)
    measured = homogeneous_y_norm(base_data.rescaled(sigma, g.value), kappa) / base_norm if base_norm > 0 else 0.0
    report = ScalingReport(
        sigma=sigma,
        gamma=g.value,
        kappa=kappa,
        deviation=deviation,
        refinement=refinement,
        nodes_compared=int(np.sum(mask[: min(scaled_field.finalized_count, grid.n_t)])),
        norm_factor_expected=sigma ** (power - kappa) if base_norm > 0 else 0.0,
        norm_factor_measured=measured,
    )
    logger.info(
        f"scaling sigma={sigma}: deviation={deviation:.3e} against budget {report.budget:.3e} "
        f"over {report.nodes_compared} nodes, norm identity error={report.norm_identity_error:.2e}"
    )
    if not math.isfinite(deviation):
        logger.warning("scaling deviation is not finite; one of the runs blew up")
    return report

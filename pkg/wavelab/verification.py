"""The verifier battery: named checks with designed outcomes.

Falsification controls are expected to fail; an item passes the battery when its
outcome matches its expectation.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

import numpy as np

from .analysis import (
    IntervalEstimate,
    SampleSet,
    WeightSpec,
    exact_weight_field,
    homogeneous_y_norm,
    lemma_integral_oracle,
    scaling_check,
    verify_duhamel_bound,
    verify_potential_bound,
)
from .blowup import (
    corrupt,
    envelope_vs_numeric,
    first_estimate_violations,
    potential_vs_numeric,
    recursion_residuals,
    sequences,
    verify_recursion,
)
from .evolution import SolverOptions, SpaceTimeField, solve
from .experiment_config import ExperimentConfig
from .radial import BlowupFamily, GaussianBump, Grid, build_on_grid
from .radial.families import data_mesh
from .utils.logger import RunLogger

logger = logging.getLogger(__name__)

# |S_j - 3/4| at the top of the ladder
S_LIMIT_TOLERANCE = 1e-12
BLOWUP_KAPPA = 1.5


@dataclass
class BatteryResult:
    """Outcome of one battery item."""

    name: str
    expect_pass: bool
    passed: bool | None
    details: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    @property
    def as_expected(self) -> bool:
        return self.error is None and self.passed == self.expect_pass

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "ok" if self.as_expected else "unexpected"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "expect_pass": self.expect_pass,
            "passed": self.passed,
            "as_expected": self.as_expected,
            "status": self.status,
            "error": self.error,
            "details": self.details,
        }


class VerificationContext:
    """Shared inputs of the battery; expensive fields are built once on first use."""

    def __init__(self, config: ExperimentConfig, seed: int):
        self.config = config
        self.settings = config.verify
        self.seed = seed

    @property
    def top_horizon(self) -> float:
        return self.settings.base_horizon * 2.0**self.settings.doublings

    @property
    def potential_top_horizon(self) -> float:
        return self.settings.potential_base_horizon * 2.0**self.settings.doublings

    @property
    def amplitude(self) -> float:
        data = self.config.data
        return data.amplitude if data.family == "blowup" else 1.0

    def exact_field(self, gamma: float, dr: float, t_max: float) -> SpaceTimeField:
        grid = Grid.build(dr, t_max, support_radius=t_max)
        return exact_weight_field(grid, gamma)

    @cached_property
    def potential_fields(self) -> dict[float, SpaceTimeField]:
        return {g: self.exact_field(g, self.settings.potential_dr, self.potential_top_horizon) for g in (2.0, 2.5)}

    @cached_property
    def duhamel_fields(self) -> dict[float, SpaceTimeField]:
        top = max(self.settings.duhamel_horizons)
        return {g: self.exact_field(g, self.settings.duhamel_dr, top) for g in (2.0, 2.5)}

    @cached_property
    def blowup_field(self) -> SpaceTimeField:
        family = BlowupFamily(amplitude=self.amplitude, kappa=BLOWUP_KAPPA)
        grid = Grid.build(self.settings.envelope_dr, self.settings.envelope_t_max, family.support_radius)
        data = build_on_grid(family, grid)
        run_logger = RunLogger(f"{self.config.name}:blowup")
        run_logger.info(f"solving blow-up field eps={self.settings.envelope_eps} on {grid.describe()}")
        field_, estimate = solve(data, self.settings.envelope_eps, 2.0, grid)
        run_logger.info(f"blow-up field: {field_.finalized_count} slabs ({estimate.reason.value})")
        return field_


Check = Callable[[VerificationContext], tuple[bool, dict[str, Any]]]


# ============================================================
# Interval estimates
# ============================================================


def _interval(kind: IntervalEstimate, params: dict[str, Any], expect_pass: bool = True) -> Check:
    def check(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
        if kind == IntervalEstimate.LOWER_POWER:
            samples = SampleSet.uniform(ctx.top_horizon, ctx.settings.lower_samples, ctx.seed)
        else:
            samples = SampleSet.stratified(ctx.top_horizon, ctx.settings.lemma_samples, ctx.seed)
        report = lemma_integral_oracle(
            kind,
            {**params, "seed": ctx.seed} if kind == IntervalEstimate.LOWER_POWER else params,
            samples,
            base_horizon=ctx.settings.base_horizon,
            doublings=ctx.settings.doublings,
            growth_tolerance=ctx.settings.growth_tolerance,
            expect_pass=expect_pass,
        )
        return report.passed, report.to_dict()

    return check


# ============================================================
# Potential and Duhamel bounds
# ============================================================


def _potential(gamma: float, weight: WeightSpec, expect_pass: bool = True) -> Check:
    def check(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
        report = verify_potential_bound(
            ctx.potential_fields[gamma],
            gamma,
            weight,
            base_horizon=ctx.settings.potential_base_horizon,
            doublings=ctx.settings.doublings,
            growth_tolerance=ctx.settings.growth_tolerance,
            per_regime=ctx.settings.potential_samples,
            seed=ctx.seed,
            expect_pass=expect_pass,
        )
        return report.passed, report.to_dict()

    return check


def _duhamel(gamma: float, with_log: bool = True, expect_pass: bool = True) -> Check:
    def check(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
        u = ctx.duhamel_fields[gamma]
        report = verify_duhamel_bound(
            u, u, u, gamma, ctx.settings.duhamel_horizons, with_log=with_log,
            growth_tolerance=ctx.settings.growth_tolerance, expect_pass=expect_pass,
        )
        return report.passed, report.to_dict()

    return check


# ============================================================
# Blow-up theory
# ============================================================


def _recursion(corrupted: bool = False) -> Check:
    def check(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
        ladder = sequences(ctx.settings.ladder_j_max, ctx.settings.envelope_eps, ctx.amplitude)
        if corrupted:
            ladder = corrupt(ladder, min(2, len(ladder)), 1.01)
        residuals = recursion_residuals(ladder)
        s_gap = abs(float(ladder[-1].S) - 0.75) if ladder[-1].j >= 30 else 0.0
        passed = verify_recursion(ladder) and s_gap <= S_LIMIT_TOLERANCE
        details = {
            "j_max": len(ladder),
            "max_residual": max(residuals) if residuals else 0.0,
            "S_gap": s_gap,
            "l_last": float(ladder[-1].l),
        }
        return passed, details

    return check


def _envelope(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    report = envelope_vs_numeric(
        ctx.blowup_field, ctx.settings.envelope_eps, ctx.amplitude, ctx.settings.envelope_j, seed=ctx.seed
    )
    return report.passed, report.to_dict()


def _first_estimate(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    report = first_estimate_violations(ctx.blowup_field, ctx.settings.envelope_eps, ctx.amplitude)
    return report.passed, report.to_dict()


def _potential_lower(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    report = potential_vs_numeric(ctx.blowup_field, ctx.settings.envelope_eps, ctx.amplitude, seed=ctx.seed)
    return report.passed, report.to_dict()


def _positivity(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    field_ = ctx.blowup_field
    # u(., 0) = eps u0 vanishes for blow-up data
    later = field_.values[1:]
    negatives = int(np.sum(later <= 0.0))
    return negatives == 0, {"slabs": int(later.shape[0]), "non_positive_nodes": negatives}


# ============================================================
# Scaling
# ============================================================


def _scaling(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    family = GaussianBump(amplitude=1.0, width=1.0)
    grid = Grid.build(0.125, 4.0, family.support_radius / ctx.settings.scaling_sigma)
    report = scaling_check(family, 0.5, 2.0, grid, ctx.settings.scaling_sigma, options=SolverOptions())
    return report.passed, report.to_dict()


def _norm_scaling(ctx: VerificationContext) -> tuple[bool, dict[str, Any]]:
    gamma = ctx.config.gamma
    kappa = 0.5 * (5.0 - gamma)
    sigma = ctx.settings.scaling_sigma
    data = BlowupFamily(amplitude=ctx.amplitude, kappa=kappa).build(data_mesh(Grid.build(0.125, 8.0, 4.0)))
    base = homogeneous_y_norm(data, kappa)
    scaled = homogeneous_y_norm(data.rescaled(sigma, gamma), kappa)
    error = abs(scaled / base - 1.0)
    return error <= 1e-12, {"gamma": gamma, "kappa": kappa, "sigma": sigma, "norm_identity_error": error}


# ============================================================
# Registry
# ============================================================

REGISTRY: dict[str, tuple[Check, bool]] = {
    "interval_reciprocal": (_interval(IntervalEstimate.RECIPROCAL, {"delta": 0.5}), True),
    "interval_power": (_interval(IntervalEstimate.POWER, {"kappa": 1.0}), True),
    "interval_log_power": (_interval(IntervalEstimate.LOG_POWER, {"kappa": 1.0, "l": 1}), True),
    "interval_lower": (_interval(IntervalEstimate.LOWER_POWER, {"kappa_max": 4.0}), True),
    "potential_critical": (_potential(2.0, WeightSpec.potential_critical()), True),
    "potential_supercritical": (_potential(2.5, WeightSpec.potential_supercritical(2.5)), True),
    "potential_weak_log2": (_potential(2.0, WeightSpec.potential_weak_log2()), True),
    "duhamel_critical": (_duhamel(2.0), True),
    "duhamel_supercritical": (_duhamel(2.5), True),
    "recursion": (_recursion(), True),
    "envelope": (_envelope, True),
    "first_estimate": (_first_estimate, True),
    "potential_lower": (_potential_lower, True),
    "positivity": (_positivity, True),
    "scaling": (_scaling, True),
    "norm_scaling": (_norm_scaling, True),
    "interval_power_control": (
        _interval(IntervalEstimate.POWER, {"kappa": 1.0, "shift": 1.0}, expect_pass=False),
        False,
    ),
    "potential_no_log_control": (
        _potential(2.0, WeightSpec.potential_critical().without_log(), expect_pass=False),
        False,
    ),
    "potential_weakened_control": (_potential(2.0, WeightSpec.potential_weakened(), expect_pass=False), False),
    "duhamel_no_log_control": (_duhamel(2.0, with_log=False, expect_pass=False), False),
    "recursion_corrupted_control": (_recursion(corrupted=True), False),
}


def run_item(name: str, ctx: VerificationContext) -> BatteryResult:
    """Run one battery item; exceptions become error results."""
    check, expect_pass = REGISTRY[name]
    try:
        passed, details = check(ctx)
    except Exception as e:
        logger.error(f"battery item {name} raised {type(e).__name__}: {e}", exc_info=e)
        return BatteryResult(name, expect_pass, None, error=f"{type(e).__name__}: {e}")
    result = BatteryResult(name, expect_pass, bool(passed), details)
    level = logging.INFO if result.as_expected else logging.WARNING
    logger.log(level, f"{name}: passed={passed} (expected {expect_pass})")
    return result


def run_battery(config: ExperimentConfig, seed: int | None = None) -> list[BatteryResult]:
    """Run the configured battery in registry order.

    Args:
        config: Experiment configuration; its verify section selects the items.
        seed: Overrides config.seed.

    Returns:
        One BatteryResult per selected item; empty for an empty selection.
    """
    selected = set(config.verify.battery)
    if not config.verify.falsification:
        selected = {name for name in selected if REGISTRY[name][1]}
    ctx = VerificationContext(config, seed if seed is not None else (config.seed or 0))
    return [run_item(name, ctx) for name in REGISTRY if name in selected]


def battery_summary(results: list[BatteryResult]) -> dict[str, Any]:
    return {
        "items": [r.to_dict() for r in results],
        "total": len(results),
        "as_expected": sum(r.as_expected for r in results),
        "errors": sum(r.error is not None for r in results),
        "all_as_expected": all(r.as_expected for r in results),
    }


def exit_code(results: list[BatteryResult]) -> int:
    """0 when every item matches its expectation, 3 on any error, 1 otherwise."""
    if any(r.error is not None for r in results):
        return 3
    return 0 if all(r.as_expected for r in results) else 1

"""Least-squares fits of log T against powers of 1/eps."""

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import stats

from .blowup.lifespan import theoretical_slope
from .errors import InsufficientDataError
from .evolution.field import LifespanEstimate

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class SweepFit:
    """log T = slope * eps^(-power) + intercept over the uncapped sweep entries."""

    power: int
    x: list[float]
    log_T: list[float]
    slope: float
    intercept: float
    r_squared: float

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def model(self) -> str:
        return f"eps^-{self.power}"

    @property
    def success(self) -> bool:
        return self.slope > 0

    def predict(self, eps: float) -> float:
        """Fitted log T at eps."""
        return self.slope * eps ** (-self.power) + self.intercept

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "n": self.n,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "success": self.success,
            "points": [{"x": x, "log_T": y} for x, y in zip(self.x, self.log_T)],
        }


def fit_lifespan(estimates: list[LifespanEstimate], power: int = 2, min_points: int = MIN_FIT_POINTS) -> SweepFit:
    """Fit log T against eps^(-power) using only entries that blew up before the horizon.

    Args:
        estimates: Sweep results.
        power: Exponent of 1/eps in the model.
        min_points: Required number of uncapped entries.

    Returns:
        SweepFit with slope, intercept and R^2.

    Raises:
        InsufficientDataError: If fewer than min_points entries are uncapped.
    """
    usable = [e for e in estimates if not e.capped and e.eps > 0]
    if len(usable) < min_points:
        raise InsufficientDataError(
            f"only {len(usable)} of {len(estimates)} sweep entries blew up before their horizon "
            f"(need {min_points}); increase horizon (t_cap) or use larger eps"
        )
    x = np.array([e.eps ** (-power) for e in usable])
    y = np.array([math.log(e.T) for e in usable])
    if np.ptp(x) == 0.0:
        raise InsufficientDataError("sweep entries share one eps; a fit needs distinct data sizes")
    result = stats.linregress(x, y)
    fit = SweepFit(
        power=power,
        x=x.tolist(),
        log_T=y.tolist(),
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(result.rvalue**2),
    )
    logger.info(f"fit {fit.model}: slope={fit.slope:.4g} intercept={fit.intercept:.4g} R^2={fit.r_squared:.4f}")
    return fit


@dataclass(frozen=True)
class ModelComparison:
    """The eps^-2 fit against the eps^-1 competitor on the same entries."""

    primary: SweepFit
    competitor: SweepFit
    theoretical_slope: float | None = None

    @property
    def primary_preferred(self) -> bool:
        return self.primary.r_squared > self.competitor.r_squared

    @property
    def slope_ratio(self) -> float | None:
        """Fitted slope over the predicted upper-bound slope 2 F^(-2/3)."""
        if self.theoretical_slope is None or self.theoretical_slope == 0.0:
            return None
        return self.primary.slope / self.theoretical_slope

    def to_dict(self) -> dict[str, Any]:
        return {
            "primary": self.primary.to_dict(),
            "competitor": self.competitor.to_dict(),
            "primary_preferred": self.primary_preferred,
            "theoretical_slope": self.theoretical_slope,
            "slope_ratio": self.slope_ratio,
        }


def compare_models(
    estimates: list[LifespanEstimate],
    amplitude: float | None = None,
    min_points: int = MIN_FIT_POINTS,
) -> ModelComparison:
    """Fit both lifespan models; with a blow-up amplitude, also relate the slope to 2 F^(-2/3)."""
    primary = fit_lifespan(estimates, power=2, min_points=min_points)
    competitor = fit_lifespan(estimates, power=1, min_points=min_points)
    comparison = ModelComparison(
        primary=primary,
        competitor=competitor,
        theoretical_slope=theoretical_slope(amplitude) if amplitude is not None else None,
    )
    if not comparison.primary_preferred:
        logger.warning(
            f"eps^-1 model fits better (R^2 {competitor.r_squared:.4f} vs {primary.r_squared:.4f})"
        )
    return comparison


@dataclass(frozen=True)
class GridCheck:
    """One eps solved on dr and on dr/2."""

    coarse: LifespanEstimate
    fine: LifespanEstimate

    @property
    def eps(self) -> float:
        return self.coarse.eps

    @property
    def shift(self) -> float:
        return abs(self.fine.T_high - self.coarse.T_high)

    @property
    def stable(self) -> bool:
        """T_high moves by less than one coarse bracket width."""
        return self.shift < self.coarse.width

    def to_row(self) -> dict[str, Any]:
        return {
            "eps": self.eps,
            "T_high_coarse": self.coarse.T_high,
            "T_high_fine": self.fine.T_high,
            "shift": self.shift,
            "width": self.coarse.width,
            "stable": self.stable,
        }


def grid_convergence(coarse: list[LifespanEstimate], fine: list[LifespanEstimate]) -> list[GridCheck]:
    """Pair a sweep with its dr/2 repeat.

    Raises:
        ValueError: If the two sweeps do not cover the same eps values.
    """
    if [e.eps for e in coarse] != [e.eps for e in fine]:
        raise ValueError("coarse and fine sweeps must share their eps list")
    checks = [GridCheck(c, f) for c, f in zip(coarse, fine)]
    for check in checks:
        if not check.stable:
            logger.warning(f"eps={check.eps:.3f}: T_high moved by {check.shift:.4g} under dr halving")
    return checks

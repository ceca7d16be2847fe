"""Quadrature oracles for the one-dimensional interval estimates.

Each estimate bounds an integral over [|t - r|, t + r] (or [t - r, t + r]) by an
explicit shape in (r, t). The oracle computes the integral with adaptive quadrature
and reports the sup of integral / shape across nested sample domains. The lower
estimate carries an explicit constant and is checked pointwise.
"""

import logging
import math
from enum import Enum
from typing import Any

import numpy as np
from scipy import integrate

from ..errors import DomainError
from .bounds import GROWTH_TOLERANCE, BoundReport, nested_horizons, trend_over
from .samples import SampleSet

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-11
# Pointwise lower bounds may be missed by this relative margin without counting as violations
LOWER_BOUND_SLACK = 1e-9


class IntervalEstimate(str, Enum):
    """The interval integrals with known bounds."""

    RECIPROCAL = "reciprocal"  # int 1/<rho> <= C min{t,r}^delta / <t-r>^delta
    POWER = "power"  # int <rho>^(-1-kappa) <= C min{r,t} / (<t+r> <t-r>^kappa)
    LOG_POWER = "log_power"  # (1/r) int log^l(2+rho)/(1+rho)^(1+kappa) <= C log^l(3+t) / (<t+r> <t-r>^kappa)
    LOWER_POWER = "lower_power"  # int_{t-r}^{t+r} rho^(-1-kappa) >= C r / ((t+r)(t-r)^kappa), C = 2/max{kappa,1}


def _validate(kind: IntervalEstimate, params: dict[str, Any]) -> None:
    if kind == IntervalEstimate.RECIPROCAL:
        delta = params.get("delta")
        if delta is None or not 0.0 < delta <= 1.0:
            raise DomainError(f"delta must lie in (0, 1], got {delta}")
        return
    kappa = params.get("kappa")
    if kappa is not None and not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if kappa is None and kind != IntervalEstimate.LOWER_POWER:
        raise DomainError(f"{kind.value} needs a kappa parameter")
    if kind == IntervalEstimate.LOG_POWER:
        l = params.get("l", 0)
        if int(l) != l or l < 0:
            raise DomainError(f"l must be a non-negative integer, got {l}")
    if kind == IntervalEstimate.LOWER_POWER and kappa is None and not params.get("kappa_max", 0) > 0:
        raise DomainError("lower_power needs kappa or a positive kappa_max")


def _bracket(x: float) -> float:
    return math.sqrt(1.0 + x * x)


def integral_lhs(kind: IntervalEstimate, r: float, t: float, kappa: float = 1.0, l: int = 0) -> float:
    """The interval integral, by adaptive quadrature."""
    if kind == IntervalEstimate.LOWER_POWER:
        a, b = t - r, t + r
        if not t > r > 0:
            raise DomainError("lower_power needs t > r > 0")
        value, _ = integrate.quad(lambda rho: rho ** (-1.0 - kappa), a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
        return value

    a, b = abs(t - r), t + r
    if b <= a:
        return 0.0
    if kind == IntervalEstimate.LOG_POWER and r <= 0:
        raise DomainError("log_power needs r > 0")

    def integrand(rho: float) -> float:
        if kind == IntervalEstimate.RECIPROCAL:
            return 1.0 / _bracket(rho)
        if kind == IntervalEstimate.POWER:
            return _bracket(rho) ** (-1.0 - kappa)
        return math.log(2.0 + rho) ** l / (1.0 + rho) ** (1.0 + kappa)

    value, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
    return value / r if kind == IntervalEstimate.LOG_POWER else value


def integral_closed_form(kind: IntervalEstimate, r: float, t: float, kappa: float = 1.0) -> float | None:
    """Exact value of the interval integral where an antiderivative is elementary."""
    if kind == IntervalEstimate.RECIPROCAL:
        return math.asinh(t + r) - math.asinh(abs(t - r))
    if kind == IntervalEstimate.LOWER_POWER:
        return ((t - r) ** (-kappa) - (t + r) ** (-kappa)) / kappa
    return None


def rhs_shape(
    kind: IntervalEstimate,
    r: float,
    t: float,
    delta: float = 1.0,
    kappa: float = 1.0,
    l: int = 0,
    shift: float = 0.0,
) -> float:
    """Right-hand side without its unknown constant; shift raises the <t-r> exponent."""
    if kind == IntervalEstimate.RECIPROCAL:
        return min(t, r) ** delta / _bracket(t - r) ** (delta + shift)
    if kind == IntervalEstimate.POWER:
        return min(r, t) / (_bracket(t + r) * _bracket(t - r) ** (kappa + shift))
    if kind == IntervalEstimate.LOG_POWER:
        return math.log(3.0 + t) ** l / (_bracket(t + r) * _bracket(t - r) ** (kappa + shift))
    constant = 2.0 / max(kappa, 1.0)
    return constant * r / ((t + r) * (t - r) ** (kappa + shift))


def lemma_integral_oracle(
    kind: "IntervalEstimate | str",
    params: dict[str, Any],
    sample_set: SampleSet,
    base_horizon: float | None = None,
    doublings: int = 3,
    growth_tolerance: float = GROWTH_TOLERANCE,
    expect_pass: bool = True,
) -> BoundReport:
    """Evaluate an interval estimate at every sample point.

    Args:
        kind: Which estimate.
        params: delta (reciprocal), kappa, l (log_power), shift (controls),
            kappa_max and seed (lower_power with random kappa per point).
        sample_set: Points (r, t).
        base_horizon: Smallest nested domain; defaults to the sample extent / 2^doublings.
        doublings: Number of domain doublings for the trend.
        growth_tolerance: Accepted growth of the running sup.
        expect_pass: Designed outcome.

    Returns:
        BoundReport. For lower_power the report is pointwise: sup_ratio is max rhs/lhs
        and violations counts points with lhs < rhs.

    Raises:
        DomainError: If a parameter lies outside its range.
    """
    kind = IntervalEstimate(kind)
    _validate(kind, params)
    shift = float(params.get("shift", 0.0))
    delta = float(params.get("delta", 1.0))
    l = int(params.get("l", 0))

    r, t = sample_set.r, sample_set.t
    if kind == IntervalEstimate.LOWER_POWER:
        keep = (t > r) & (r > 0)
    elif kind == IntervalEstimate.LOG_POWER:
        keep = r > 0
    else:
        keep = np.ones(r.shape, dtype=bool)
    samples = sample_set.filter(keep)

    if kind == IntervalEstimate.LOWER_POWER and "kappa" not in params:
        rng = np.random.default_rng(int(params.get("seed", 0)))
        kappas = rng.uniform(0.0, float(params["kappa_max"]), len(samples))
        kappas[kappas == 0.0] = float(params["kappa_max"])
    else:
        kappas = np.full(len(samples), float(params.get("kappa", 1.0)))

    lhs = np.empty(len(samples))
    rhs = np.empty(len(samples))
    closed_error = 0.0
    for k, (rk, tk, kap) in enumerate(zip(samples.r, samples.t, kappas)):
        lhs[k] = integral_lhs(kind, float(rk), float(tk), float(kap), l)
        rhs[k] = rhs_shape(kind, float(rk), float(tk), delta, float(kap), l, shift)
        exact = integral_closed_form(kind, float(rk), float(tk), float(kap))
        if exact is not None and exact > 0:
            closed_error = max(closed_error, abs(lhs[k] - exact) / exact)

    json_params = dict(params)
    notes = {"closed_form_rel_error": closed_error}
    extent = samples.extent
    if base_horizon is None:
        base_horizon = float(np.max(extent)) / 2.0**doublings if len(samples) else 1.0
    horizons = nested_horizons(base_horizon, doublings)

    if kind == IntervalEstimate.LOWER_POWER:
        ratio = np.where(lhs > 0, rhs / np.where(lhs > 0, lhs, 1.0), np.inf)
        violations = int(np.sum(lhs < rhs * (1.0 - LOWER_BOUND_SLACK)))
        mode = "pointwise"
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs > 0, lhs / rhs, 0.0)
        violations = 0
        mode = "trend"

    if len(samples) == 0:
        return BoundReport(kind.value, json_params, 0.0, (0.0, 0.0), 0, [0.0] * len(horizons), horizons,
                           growth_tolerance, mode=mode, expect_pass=expect_pass, notes=notes)
    k = int(np.argmax(ratio))
    report = BoundReport(
        kind=kind.value,
        params=json_params,
        sup_ratio=float(ratio[k]),
        argmax=(float(samples.r[k]), float(samples.t[k])),
        n_samples=len(samples),
        trend=trend_over(extent, ratio, horizons),
        horizons=horizons,
        growth_tolerance=growth_tolerance,
        mode=mode,
        violations=violations,
        expect_pass=expect_pass,
        notes=notes,
    )
    logger.info(report.summary())
    return report

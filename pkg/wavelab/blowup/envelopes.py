"""Lower-bound envelopes for blow-up data and their comparison with solved fields.

All envelopes are zero outside their interior region t - r >= l, so callers can
evaluate them on whole grids.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..analysis.bounds import potential_at_nodes
from ..analysis.samples import SampleSet
from ..convolution.kernel import as_gamma
from ..errors import ConfigurationError
from ..evolution.field import SpaceTimeField
from ..radial.profile import ArrayLike
from .ladder import BlowupConstants, a_exponent, l_level, log_C

logger = logging.getLogger(__name__)

SCATTERED_POINTS = 400


def _as_arrays(r: ArrayLike, t: ArrayLike) -> tuple[np.ndarray, np.ndarray, bool]:
    scalar = np.ndim(r) == 0 and np.ndim(t) == 0
    rr, tt = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    return np.atleast_1d(rr), np.atleast_1d(tt), scalar


def log_lower_envelope(j: int, eps: float, B: float, r: ArrayLike, t: ArrayLike) -> np.ndarray:
    """log of the j-th envelope; -inf wherever the envelope vanishes."""
    rr, tt, _ = _as_arrays(r, t)
    level = float(l_level(j))
    out = np.full(rr.shape, -np.inf)
    gap = tt - rr
    inside = gap > level
    if np.any(inside):
        lifted = np.log(np.log(gap[inside] / level))
        out[inside] = (
            log_C(j, eps, B) - np.log(tt[inside] + rr[inside]) - 0.5 * np.log(gap[inside]) + a_exponent(j) * lifted
        )
    return out


def lower_envelope(j: int, eps: float, B: float, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """C_j / ((t+r)(t-r)^(1/2)) * log((t-r)/l_j)^(a_j) on t - r >= l_j, else 0."""
    rr, tt, scalar = _as_arrays(r, t)
    out = np.exp(log_lower_envelope(j, eps, B, rr, tt))
    return float(out[0]) if scalar else out


def potential_lower(eps: float, B: float, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """C_0^2 pi eps^2 r log(t-r) / (t+r)^3 on t - r >= 1, else 0."""
    rr, tt, scalar = _as_arrays(r, t)
    c0 = BlowupConstants(B).C0
    gap = tt - rr
    out = np.zeros(rr.shape)
    inside = gap >= 1.0
    out[inside] = c0**2 * math.pi * eps**2 * rr[inside] * np.log(gap[inside]) / (tt[inside] + rr[inside]) ** 3
    return float(out[0]) if scalar else out


def first_estimate(eps: float, B: float, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """C_0 eps / ((t+r)(t-r)^(1/2)) on t - r >= 1, else 0."""
    rr, tt, scalar = _as_arrays(r, t)
    c0 = BlowupConstants(B).C0
    gap = tt - rr
    out = np.zeros(rr.shape)
    inside = gap >= 1.0
    out[inside] = c0 * eps / ((tt[inside] + rr[inside]) * np.sqrt(gap[inside]))
    return float(out[0]) if scalar else out


@dataclass
class EnvelopeReport:
    """Nodal comparison of a solved field against a lower bound."""

    kind: str
    params: dict[str, Any]
    checked: int
    skipped: int
    violations: int
    min_margin: float
    per_level: dict[str, dict[str, Any]] = field(default_factory=dict)
    expect_pass: bool = True

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def as_expected(self) -> bool:
        return self.passed == self.expect_pass

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.kind}: {status} checked={self.checked} skipped={self.skipped} "
            f"violations={self.violations} min_margin={self.min_margin:.4g}"
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": self.params,
            "checked": self.checked,
            "skipped": self.skipped,
            "violations": self.violations,
            "min_margin": self.min_margin if math.isfinite(self.min_margin) else None,
            "per_level": self.per_level,
            "expect_pass": self.expect_pass,
            "passed": self.passed,
        }


def _check_params(field_: SpaceTimeField, eps: float, B: float) -> None:
    params = field_.params
    if "eps" not in params or "B" not in params:
        raise ConfigurationError("field carries no (eps, B) metadata; solve it from blow-up data")
    if not math.isclose(params["eps"], eps, rel_tol=1e-12) or not math.isclose(params["B"], B, rel_tol=1e-12):
        raise ConfigurationError(
            f"field was solved with eps={params['eps']}, B={params['B']}, not eps={eps}, B={B}"
        )


def _usable_nodes(field_: SpaceTimeField) -> tuple[np.ndarray, np.ndarray]:
    """Node coordinates on finalized slabs whose backward cone lies inside the grid."""
    grid = field_.grid
    tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
    usable = grid.reliable_mask()
    usable[field_.finalized_count :] = False
    return rr[usable], tt[usable]


def default_points(field_: SpaceTimeField, seed: int = 0, n_scattered: int = SCATTERED_POINTS) -> SampleSet:
    """Nodes on the line r = t/2 plus seeded scattered nodes with t - r >= 2."""
    r, t = _usable_nodes(field_)
    on_line = np.isclose(2.0 * r, t, rtol=0.0, atol=1e-9 * max(field_.grid.r_max, 1.0))
    deep = np.flatnonzero(~on_line & (t - r >= 2.0))
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(deep, size=min(n_scattered, deep.size), replace=False)) if deep.size else deep
    keep = np.concatenate([np.flatnonzero(on_line), chosen])
    tags = np.where(on_line[keep], "gamma_line", "interior")
    return SampleSet(r[keep], t[keep], tags)


def _values_at(field_: SpaceTimeField, points: SampleSet) -> np.ndarray:
    grid = field_.grid
    i = np.array([grid.r_index(float(r)) for r in points.r], dtype=int)
    j = np.array([grid.t_index(float(t)) for t in points.t], dtype=int)
    return field_.values[j, i]


def envelope_vs_numeric(
    field_: SpaceTimeField,
    eps: float,
    B: float,
    j_list: list[int],
    points: SampleSet | None = None,
    seed: int = 0,
    expect_pass: bool = True,
) -> EnvelopeReport:
    """Check u >= lower_envelope(j) at grid nodes for each rung j.

    Points outside t - r > l_j are skipped. Violations point at solver under-resolution.

    Args:
        field_: Field solved from blow-up data.
        eps: Data size the field was solved with.
        B: Blow-up amplitude the field was solved with.
        j_list: Rungs to check.
        points: Grid nodes; the line r = t/2 plus scattered interior nodes when omitted.
        seed: Seed for the scattered nodes.
        expect_pass: Designed outcome.

    Returns:
        EnvelopeReport aggregated over all rungs, with a per-rung breakdown.

    Raises:
        ConfigurationError: If the field metadata disagree with (eps, B).
    """
    _check_params(field_, eps, B)
    points = default_points(field_, seed) if points is None else points
    values = _values_at(field_, points)
    log_u = np.full(values.shape, -np.inf)
    positive = values > 0
    log_u[positive] = np.log(values[positive])

    checked = skipped = violations = 0
    min_margin = math.inf
    per_level: dict[str, dict[str, Any]] = {}
    for j in j_list:
        log_env = log_lower_envelope(j, eps, B, points.r, points.t)
        active = np.isfinite(log_env)
        bad = int(np.sum(log_u[active] < log_env[active]))
        margin = float(np.min(log_u[active] - log_env[active])) if np.any(active) else math.inf
        per_level[str(j)] = {
            "checked": int(np.sum(active)),
            "violations": bad,
            "min_log_margin": margin if math.isfinite(margin) else None,
        }
        checked += int(np.sum(active))
        skipped += int(np.sum(~active))
        violations += bad
        min_margin = min(min_margin, math.exp(margin) if margin < 700 else math.inf)
        logger.debug(f"envelope j={j}: checked={int(np.sum(active))} violations={bad}")

    report = EnvelopeReport(
        kind="envelope",
        params={"eps": eps, "B": B, "j_list": list(j_list), "dr": field_.grid.dr},
        checked=checked,
        skipped=skipped,
        violations=violations,
        min_margin=min_margin,
        per_level=per_level,
        expect_pass=expect_pass,
    )
    logger.info(report.summary())
    return report


def first_estimate_violations(field_: SpaceTimeField, eps: float, B: float, expect_pass: bool = True) -> EnvelopeReport:
    """Check u >= C_0 eps / ((t+r)(t-r)^(1/2)) at every usable node with t - r >= 1."""
    _check_params(field_, eps, B)
    r, t = _usable_nodes(field_)
    inside = t - r >= 1.0
    grid = field_.grid
    values = field_.values[np.rint(t / grid.dt).astype(int), np.rint(r / grid.dr).astype(int)]
    bound = first_estimate(eps, B, r, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = np.where(inside, values / np.where(bound > 0, bound, 1.0), np.inf)
    report = EnvelopeReport(
        kind="first_estimate",
        params={"eps": eps, "B": B, "dr": grid.dr},
        checked=int(np.sum(inside)),
        skipped=int(np.sum(~inside)),
        violations=int(np.sum(inside & (values < bound))),
        min_margin=float(np.min(margin)) if margin.size else math.inf,
        expect_pass=expect_pass,
    )
    logger.info(report.summary())
    return report


def potential_vs_numeric(
    field_: SpaceTimeField,
    eps: float,
    B: float,
    n_points: int = 200,
    seed: int = 0,
    expect_pass: bool = True,
) -> EnvelopeReport:
    """Check (V_2 * u^2)(r, t) >= C_0^2 pi eps^2 r log(t-r)/(t+r)^3 at seeded nodes with t - r > 1."""
    _check_params(field_, eps, B)
    r, t = _usable_nodes(field_)
    candidates = np.flatnonzero((t - r > 1.0) & (r > 0.0))
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(candidates, size=min(n_points, candidates.size), replace=False))
    points = SampleSet(r[chosen], t[chosen], np.full(chosen.size, "interior"))

    potential = potential_at_nodes(field_, as_gamma(2.0), points) if len(points) else np.zeros(0)
    bound = np.asarray(potential_lower(eps, B, points.r, points.t))
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = np.where(bound > 0, potential / np.where(bound > 0, bound, 1.0), np.inf)
    report = EnvelopeReport(
        kind="potential_lower",
        params={"eps": eps, "B": B, "dr": field_.grid.dr, "n_points": int(chosen.size)},
        checked=int(chosen.size),
        skipped=0,
        violations=int(np.sum(potential < bound)),
        min_margin=float(np.min(margin)) if margin.size else math.inf,
        expect_pass=expect_pass,
    )
    logger.info(report.summary())
    return report

"""Stratified (r, t) sample sets for bound verification."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import DomainError
from ..radial.grid import Grid


class SampleRegime(str, Enum):
    """Regions where the estimates attain their extremes."""

    NEAR_CONE = "near_cone"  # |t - r| <= t/2
    INTERIOR = "interior"  # t >= 2r
    EXTERIOR = "exterior"  # r >= 2t


def regime_mask(r: np.ndarray, t: np.ndarray, regime: SampleRegime) -> np.ndarray:
    if regime == SampleRegime.NEAR_CONE:
        return np.abs(t - r) <= 0.5 * t
    if regime == SampleRegime.INTERIOR:
        return t >= 2.0 * r
    return r >= 2.0 * t


@dataclass(frozen=True)
class SampleSet:
    """Points (r_k, t_k) with a nesting horizon per point."""

    r: np.ndarray
    t: np.ndarray
    regime: np.ndarray

    def __post_init__(self) -> None:
        if self.r.shape != self.t.shape or self.r.shape != self.regime.shape:
            raise DomainError("sample arrays must have equal shapes")
        if np.any(self.r < 0) or np.any(self.t < 0):
            raise DomainError("samples must lie in [0, inf)^2")

    def __len__(self) -> int:
        return int(self.r.size)

    @property
    def extent(self) -> np.ndarray:
        """max(r, t) per point; nested domains are {extent <= H}."""
        return np.maximum(self.r, self.t)

    def within(self, horizon: float) -> "SampleSet":
        keep = self.extent <= horizon
        return SampleSet(self.r[keep], self.t[keep], self.regime[keep])

    def filter(self, keep: np.ndarray) -> "SampleSet":
        return SampleSet(self.r[keep], self.t[keep], self.regime[keep])

    @classmethod
    def stratified(cls, horizon: float, per_regime: int, seed: int, t_min: float = 0.0) -> "SampleSet":
        """Random points in [0, horizon]^2, split evenly across the three regimes.

        Times are drawn log-uniformly so that every nested domain is populated.
        """
        if horizon <= 0 or per_regime < 1:
            raise DomainError("horizon must be positive and per_regime >= 1")
        rng = np.random.default_rng(seed)
        low = max(t_min, 1e-2)
        rs, ts, tags = [], [], []
        for regime in SampleRegime:
            if regime == SampleRegime.EXTERIOR:
                r = np.exp(rng.uniform(np.log(low), np.log(horizon), per_regime))
                t = r * rng.uniform(0.0, 0.5, per_regime)
            else:
                t = np.exp(rng.uniform(np.log(max(low, t_min)), np.log(horizon), per_regime))
                if regime == SampleRegime.NEAR_CONE:
                    r = t * rng.uniform(0.5, 1.5, per_regime)
                else:
                    r = t * rng.uniform(0.0, 0.5, per_regime)
            rs.append(r)
            ts.append(t)
            tags.append(np.full(per_regime, regime.value))
        r_all, t_all = np.concatenate(rs), np.concatenate(ts)
        inside = np.maximum(r_all, t_all) <= horizon
        return cls(r_all[inside], t_all[inside], np.concatenate(tags)[inside])

    @classmethod
    def uniform(cls, horizon: float, n: int, seed: int) -> "SampleSet":
        """n points uniform in [0, horizon]^2, tagged by regime."""
        rng = np.random.default_rng(seed)
        r = rng.uniform(0.0, horizon, n)
        t = rng.uniform(0.0, horizon, n)
        return cls(r, t, _tag(r, t))

    @classmethod
    def on_grid(
        cls,
        grid: Grid,
        per_regime: int,
        seed: int,
        horizon: float | None = None,
        mask: np.ndarray | None = None,
    ) -> "SampleSet":
        """Grid nodes drawn per regime, log-uniform in time, optionally restricted by a node mask."""
        rng = np.random.default_rng(seed)
        horizon = grid.t[-1] if horizon is None else horizon
        tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
        allowed = (tt <= horizon) & (rr <= horizon)
        if mask is not None:
            allowed &= mask
        rs, ts, tags = [], [], []
        for regime in SampleRegime:
            candidates = np.flatnonzero(allowed & regime_mask(rr, tt, regime))
            if candidates.size == 0:
                continue
            extent = np.maximum(rr.ravel()[candidates], tt.ravel()[candidates])
            # Inverse-square extent weights give log-uniform coverage of nested domains
            p = 1.0 / np.maximum(extent, grid.dr) ** 2
            p /= p.sum()
            chosen = rng.choice(candidates, size=min(per_regime, candidates.size), replace=False, p=p)
            rs.append(rr.ravel()[chosen])
            ts.append(tt.ravel()[chosen])
            tags.append(np.full(chosen.size, regime.value))
        if not rs:
            return cls(np.zeros(0), np.zeros(0), np.zeros(0, dtype="<U9"))
        return cls(np.concatenate(rs), np.concatenate(ts), np.concatenate(tags))


def _tag(r: np.ndarray, t: np.ndarray) -> np.ndarray:
    tags = np.full(r.shape, SampleRegime.NEAR_CONE.value, dtype="<U9")
    tags[regime_mask(r, t, SampleRegime.INTERIOR)] = SampleRegime.INTERIOR.value
    tags[regime_mask(r, t, SampleRegime.EXTERIOR)] = SampleRegime.EXTERIOR.value
    return tags

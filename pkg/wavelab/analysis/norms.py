"""Weighted sup norms of solutions and data."""

import numpy as np

from ..convolution.kernel import Gamma
from ..errors import SequencingError
from ..evolution.field import SpaceTimeField
from ..radial.families import InitialDataSet
from ..radial.profile import japanese
from .weights import WeightSpec

# Tail sups are scanned over r_end * 10^[0, TAIL_DECADES] plus the limit at infinity
TAIL_DECADES = 12
TAIL_POINTS = 4001


def _slabs_before(field: SpaceTimeField, T: float | None) -> int:
    if T is None:
        return field.finalized_count
    needed = int(np.sum(field.grid.t < T))
    if field.finalized_count < needed:
        raise SequencingError(f"x_norm up to T={T} needs {needed} slabs, {field.finalized_count} finalized")
    return needed


def weighted_nodal_max(
    field: SpaceTimeField, weight: WeightSpec, T: float | None = None, mask: np.ndarray | None = None
) -> tuple[float, tuple[float, float]]:
    """max of w|u| over nodes with t < T, and its (r, t) location."""
    count = _slabs_before(field, T)
    if count == 0:
        return 0.0, (0.0, 0.0)
    grid = field.grid
    tt, rr = np.meshgrid(grid.t[:count], grid.r, indexing="ij")
    weighted = np.abs(field.values[:count]) * weight(rr, tt)
    if mask is not None:
        weighted = np.where(mask[:count], weighted, 0.0)
    flat = int(np.argmax(weighted))
    j, i = np.unravel_index(flat, weighted.shape)
    return float(weighted[j, i]), (float(grid.r[i]), float(grid.t[j]))


def x_norm(field: SpaceTimeField, gamma: "Gamma | float", T: float | None = None) -> float:
    """Nodal sup of <t+r> <t-r>^((3-gamma)/2) |u| over slabs with t < T.

    Args:
        field: Solution field.
        gamma: Potential exponent.
        T: Time bound; defaults to all finalized slabs.

    Raises:
        SequencingError: If a slab with t < T is not finalized.
    """
    value, _ = weighted_nodal_max(field, WeightSpec.x_norm(gamma), T)
    return value


def x_norm_history(field: SpaceTimeField, gamma: "Gamma | float") -> np.ndarray:
    """Running X norm after each finalized slab."""
    weight = WeightSpec.x_norm(gamma)
    grid = field.grid
    count = field.finalized_count
    tt, rr = np.meshgrid(grid.t[:count], grid.r, indexing="ij")
    per_slab = np.max(np.abs(field.values) * weight(rr, tt), axis=1) if count else np.zeros(0)
    return np.maximum.accumulate(per_slab)


def _data_sup(data: InitialDataSet, kappa: float, homogeneous: bool) -> float:
    def weight(x: np.ndarray) -> np.ndarray:
        return np.abs(x) if homogeneous else np.asarray(japanese(x))

    def combined(x: np.ndarray) -> np.ndarray:
        u0 = np.abs(np.asarray(data.u0(x)))
        du0 = np.abs(np.asarray(data.u0.slope(x)))
        u1 = np.abs(np.asarray(data.u1(x)))
        return weight(x) ** kappa * u0 + weight(x) ** (kappa + 1.0) * (du0 + u1)

    lam = np.union1d(data.u0.lam, data.u1.lam)
    nodal = float(np.max(combined(lam)))

    r_end = float(lam[-1])
    scan = r_end * np.logspace(0.0, TAIL_DECADES, TAIL_POINTS)
    tail = float(np.max(combined(scan)))
    return max(nodal, tail, _limit_at_infinity(data, kappa))


def _limit_at_infinity(data: InitialDataSet, kappa: float) -> float:
    """Limit of the weighted data expression as lambda -> infinity (weights ~ lambda)."""
    total = 0.0
    for profile, power in ((data.u0, kappa), (data.u1, kappa + 1.0)):
        tail = profile.tail
        if tail is None or tail.amplitude == 0.0:
            continue
        if np.isclose(tail.exponent, power):
            total += abs(tail.amplitude) * tail.scale ** (-tail.exponent)
            if profile is data.u0:
                total += tail.exponent * abs(tail.amplitude) * tail.scale ** (-tail.exponent)
    return total


def y_norm(data: InitialDataSet, kappa: float) -> float:
    """sup <x>^kappa |u0| + <x>^(kappa+1) (|u0'| + |u1|), tails included."""
    if data.is_zero:
        return 0.0
    return _data_sup(data, kappa, homogeneous=False)


def homogeneous_y_norm(data: InitialDataSet, kappa: float) -> float:
    """sup |x|^kappa |u0| + |x|^(kappa+1) (|u0'| + |u1|), tails included."""
    if data.is_zero:
        return 0.0
    return _data_sup(data, kappa, homogeneous=True)

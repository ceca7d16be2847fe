"""The Duhamel operator L over the backward influence region D(r, t).

L(N)(r, t) = (1/2r) * integral_0^t integral_{|r-t+s|}^{r+t-s} lambda N(lambda, s) d lambda ds,
with the limit integral_0^t (t - s) N(t - s, s) ds at r = 0.

On the characteristic grid (dt = dr = h) the inner lambda-integral of slab j is a
difference of the cumulative trapezoid G_j(k) = integral_0^{kh} lambda N_j, taken at
k = i + n - j and k = |i - n + j|. The outer s-integral is a trapezoid sum over the
strips below t - h; the last strip [t - h, t] uses the exact rule for N linear in s.
"""

import logging

import numpy as np
from scipy import integrate

from ..errors import DomainError, SequencingError
from ..radial.grid import Grid
from .field import NonlinearityField

logger = logging.getLogger(__name__)


def _primitive(grid: Grid, n_values: np.ndarray) -> np.ndarray:
    """G(k) for k = 0..n_r + n_t, constant past the last node (N vanishes there)."""
    lam = grid.r
    inner = integrate.cumulative_trapezoid(lam * n_values, dx=grid.dr, initial=0.0)
    return np.concatenate([inner, np.full(grid.n_t, inner[-1])])


def _radial_moment(grid: Grid, n_values: np.ndarray) -> np.ndarray:
    """E(k) = lambda_k N(lambda_k) for k = 0..n_r + n_t, zero past the last node."""
    return np.concatenate([grid.r * n_values, np.zeros(grid.n_t)])


class DuhamelAccumulator:
    """Running characteristic sums for slab-by-slab evaluation of L.

    After slabs 0..n-1 have been pushed, evaluate(n, N_n) returns L on slab n in
    O(n_r) work; push() folds a slab into the sums in O(n_r + n_t).
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        size = grid.n_r + grid.n_t + 1
        # plus[m] = sum_{j<n} G_j(m - j);  minus[d + n_t] = sum_{j<n} G_j(|d + j|)
        self._plus = np.zeros(size)
        self._minus = np.zeros(size)
        self._origin = np.zeros(size)
        self._first: tuple[np.ndarray, np.ndarray] | None = None
        self._last: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self._count = 0
        self._offsets = np.arange(-grid.n_t, grid.n_r + 1)

    @property
    def count(self) -> int:
        """Number of slabs folded into the sums."""
        return self._count

    def push(self, n_values: np.ndarray) -> None:
        """Fold the next finalized nonlinearity slab into the running sums."""
        j = self._count
        if j >= self.grid.n_t:
            raise SequencingError(f"cannot push slab {j}: grid has {self.grid.n_t} slabs")
        n_values = np.asarray(n_values, dtype=float)
        primitive = _primitive(self.grid, n_values)
        moment = _radial_moment(self.grid, n_values)
        size = primitive.size

        self._plus[j:] += primitive[: size - j]
        self._minus += primitive[np.abs(self._offsets + j)]
        self._origin[j:] += moment[: size - j]

        if j == 0:
            self._first = (primitive, moment)
        self._last = (primitive, moment, n_values)
        self._count += 1

    def evaluate(self, n: int, n_current: np.ndarray) -> np.ndarray:
        """L on slab n given the finalized slabs 0..n-1 and a value for N on slab n.

        Args:
            n: Slab index; must equal the number of pushed slabs.
            n_current: Nonlinearity on slab n (predicted or corrected).

        Returns:
            Array of L(r_i, s_n) for i = 0..n_r.

        Raises:
            SequencingError: If slabs before n have not all been pushed.
        """
        if n != self._count:
            raise SequencingError(f"L on slab {n} needs exactly slabs 0..{n - 1}; {self._count} pushed")
        grid = self.grid
        if n == 0:
            return np.zeros(grid.n_r + 1)
        assert self._first is not None and self._last is not None
        h = grid.dr
        i = np.arange(grid.n_r + 1)
        first_g, first_e = self._first
        last_g, last_e, last_n = self._last
        n_current = np.asarray(n_current, dtype=float)

        sums = self._plus[i + n] - self._minus[i - n + grid.n_t]
        ends = 0.5 * (first_g[i + n] - first_g[np.abs(i - n)]) + 0.5 * (last_g[i + 1] - last_g[np.abs(i - 1)])
        trapezoid = h * (sums - ends)
        last_strip = h * h * grid.r * (2.0 * last_n + n_current) / 3.0

        out = np.empty(grid.n_r + 1)
        out[1:] = (trapezoid[1:] + last_strip[1:]) / (2.0 * grid.r[1:])

        origin_trapezoid = h * (self._origin[n] - 0.5 * first_e[n] - 0.5 * last_e[1])
        out[0] = origin_trapezoid + h * h * (n_current[0] / 6.0 + last_n[1] / 3.0)
        return out


def duhamel(nonlinearity: NonlinearityField, r: float, t: float) -> float:
    """Evaluate L(N)(r, t) directly from the stored slabs.

    Slab-by-slab reference implementation of the accumulator. If the slab at t is
    not finalized, N there is extrapolated linearly from the two previous slabs.

    Args:
        nonlinearity: Nonlinearity values on a characteristic grid.
        r: Radius, 0 <= r <= r_max (interpolated linearly between nodes).
        t: Time; must be a slab time of the grid.

    Returns:
        The Duhamel term at (r, t).

    Raises:
        DomainError: If t is not a slab time or r lies outside the grid.
        SequencingError: If a slab before t is not finalized.
    """
    grid = nonlinearity.grid
    n = grid.t_index(t)
    if not 0.0 <= r <= grid.r_max:
        raise DomainError(f"r={r} lies outside [0, {grid.r_max}]")
    if nonlinearity.finalized_count < n:
        raise SequencingError(
            f"L at t={t} needs slabs 0..{n - 1}; only {nonlinearity.finalized_count} finalized"
        )
    row = duhamel_slab(nonlinearity, n)
    return float(np.interp(r, grid.r, row))


def duhamel_slab(nonlinearity: NonlinearityField, n: int) -> np.ndarray:
    """L on every node of slab n, summed directly over the earlier slabs."""
    grid = nonlinearity.grid
    if nonlinearity.finalized_count < n:
        raise SequencingError(f"slab {n} depends on unfinalized nonlinearity slabs")
    if n == 0:
        return np.zeros(grid.n_r + 1)
    if nonlinearity.finalized_count > n:
        current = nonlinearity.slab(n)
    elif n >= 2:
        current = 2.0 * nonlinearity.slab(n - 1) - nonlinearity.slab(n - 2)
    else:
        current = nonlinearity.slab(0)

    h = grid.dr
    i = np.arange(grid.n_r + 1)
    strips = np.empty((n, grid.n_r + 1))
    origin = np.empty(n)
    for j in range(n):
        primitive = _primitive(grid, nonlinearity.slab(j))
        moment = _radial_moment(grid, nonlinearity.slab(j))
        strips[j] = primitive[i + n - j] - primitive[np.abs(i - n + j)]
        origin[j] = moment[n - j]

    weights = np.ones(n)
    weights[0] -= 0.5
    weights[-1] -= 0.5
    previous = nonlinearity.slab(n - 1)

    out = np.empty(grid.n_r + 1)
    trapezoid = h * (weights @ strips)
    last_strip = h * h * grid.r * (2.0 * previous + current) / 3.0
    out[1:] = (trapezoid[1:] + last_strip[1:]) / (2.0 * grid.r[1:])
    out[0] = h * float(weights @ origin) + h * h * (current[0] / 6.0 + previous[1] / 3.0)
    return out

"""Characteristic-aligned space-time grids."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

# Relative slack when snapping real coordinates onto grid nodes
NODE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform (r, t) grid with dt = dr.

    Radial nodes are r_i = i*dr for i = 0..n_r; time slabs are s_j = j*dt for
    j = 0..n_t-1, so the grid covers [0, t_max).
    """

    dr: float
    t_max: float
    r_max: float
    support_radius: float = 0.0
    n_r: int = field(init=False)
    n_t: int = field(init=False)

    def __post_init__(self) -> None:
        if not (self.dr > 0 and math.isfinite(self.dr)):
            raise DomainError(f"dr must be positive and finite, got {self.dr}")
        if self.t_max <= 0:
            raise DomainError(f"t_max must be positive, got {self.t_max}")
        if self.support_radius < 0:
            raise DomainError(f"support_radius must be non-negative, got {self.support_radius}")

        n_t = _whole_cells(self.t_max, self.dr, "t_max")
        n_r = _whole_cells(self.r_max, self.dr, "r_max")
        if n_r * self.dr < self.t_max + self.support_radius - NODE_TOLERANCE * self.r_max:
            raise DomainError(
                f"r_max={self.r_max} violates domain of dependence: need r_max >= t_max + support_radius "
                f"= {self.t_max + self.support_radius}"
            )
        object.__setattr__(self, "n_t", n_t)
        object.__setattr__(self, "n_r", n_r)

    @classmethod
    def build(cls, dr: float, t_max: float, support_radius: float = 0.0) -> "Grid":
        """Build a grid whose truncation radius contains the domain of dependence.

        Args:
            dr: Radial (and time) step.
            t_max: Requested horizon, rounded up to a whole number of steps.
            support_radius: Radius of the data region of interest.

        Returns:
            Grid with r_max = t_max + support_radius rounded up to whole cells.
        """
        if dr <= 0:
            raise DomainError(f"dr must be positive, got {dr}")
        n_t = max(1, math.ceil(t_max / dr - NODE_TOLERANCE))
        n_r = max(1, math.ceil((n_t * dr + support_radius) / dr - NODE_TOLERANCE))
        return cls(dr=dr, t_max=n_t * dr, r_max=n_r * dr, support_radius=support_radius)

    @property
    def dt(self) -> float:
        """Time step; identical to dr by construction."""
        return self.dr

    @property
    def r(self) -> np.ndarray:
        """Radial nodes, length n_r + 1."""
        return np.arange(self.n_r + 1, dtype=float) * self.dr

    @property
    def t(self) -> np.ndarray:
        """Time nodes of the slabs, length n_t."""
        return np.arange(self.n_t, dtype=float) * self.dr

    def r_index(self, r: float) -> int:
        """Snap a radius onto its node index.

        Raises:
            DomainError: If r is not a node of this grid.
        """
        return self._snap(r, self.n_r, "r")

    def t_index(self, t: float) -> int:
        """Snap a time onto its slab index.

        Raises:
            DomainError: If t is not a slab time of this grid.
        """
        return self._snap(t, self.n_t - 1, "t")

    def reliable_mask(self) -> np.ndarray:
        """Nodes whose backward characteristic cone stays inside r <= r_max.

        Returns:
            Boolean array of shape (n_t, n_r + 1).
        """
        return self.t[:, None] + self.r[None, :] <= self.r_max + NODE_TOLERANCE * self.r_max

    def describe(self) -> dict[str, float]:
        """Grid parameters for provenance headers."""
        return {"dr": self.dr, "dt": self.dt, "r_max": self.r_max, "t_max": self.t_max}

    def _snap(self, value: float, max_index: int, name: str) -> int:
        position = value / self.dr
        index = int(round(position))
        if abs(position - index) > NODE_TOLERANCE * max(1.0, abs(position)) or not 0 <= index <= max_index:
            raise DomainError(f"{name}={value} is not a node of the grid (dr={self.dr}, max index {max_index})")
        return index


def _whole_cells(length: float, dr: float, name: str) -> int:
    cells = length / dr
    n = int(round(cells))
    if n < 1 or abs(cells - n) > NODE_TOLERANCE * max(1.0, cells):
        raise DomainError(f"{name}={length} is not a whole number of cells of size dr={dr}")
    return n

"""Space-time fields, nonlinearity fields and lifespan estimates."""

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Literal

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import DomainError, SequencingError
from ..radial.grid import Grid
from ..radial.profile import RadialProfile, TailSpec, japanese

CheckpointFormat = Literal["npz", "csv"]


class TerminationReason(str, Enum):
    """Why a solver run stopped."""

    PICARD_DIVERGENCE = "picard-divergence"
    NORM_THRESHOLD = "norm-threshold"
    HORIZON_REACHED = "horizon-reached"


@dataclass(frozen=True)
class LifespanEstimate:
    """Bracket [T_low, T_high) for the numerical lifespan of one run."""

    eps: float
    T_low: float
    T_high: float
    reason: TerminationReason
    t_max: float

    def __post_init__(self) -> None:
        if not self.T_low < self.T_high:
            raise DomainError(f"lifespan bracket must satisfy T_low < T_high, got [{self.T_low}, {self.T_high}]")
        if self.reason == TerminationReason.HORIZON_REACHED and not math.isclose(self.T_high, self.t_max):
            raise DomainError("a horizon-reached estimate must have T_high = t_max")

    @property
    def T(self) -> float:
        """Bracket midpoint."""
        return 0.5 * (self.T_low + self.T_high)

    @property
    def width(self) -> float:
        return self.T_high - self.T_low

    @property
    def capped(self) -> bool:
        """True when the run hit the horizon; such entries are excluded from fits."""
        return self.reason == TerminationReason.HORIZON_REACHED

    def to_row(self) -> dict[str, Any]:
        return {"eps": self.eps, "T_low": self.T_low, "T_high": self.T_high, "reason": self.reason.value}


class SpaceTimeField:
    """Values u(r_i, s_j) on a grid, finalized slab by slab in time order.

    Finalized slabs are immutable and always finite.
    """

    def __init__(
        self,
        grid: Grid,
        tail_exponent: float | None = None,
        params: dict[str, float] | None = None,
        tail_scale: float = 1.0,
    ):
        """Initialize an empty field.

        Args:
            grid: Space-time grid.
            tail_exponent: Decay rate p of u(., s) beyond r_max, if it has a power-law tail.
            params: Run parameters (eps, B, gamma, ...) kept for provenance checks.
            tail_scale: Length scale s of the tail A <s r>^(-p).
        """
        self.grid = grid
        self.tail_exponent = tail_exponent
        self.tail_scale = tail_scale
        self.params: dict[str, float] = dict(params or {})
        self._values = np.zeros((grid.n_t, grid.n_r + 1))
        self._finalized = 0

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_function(
        cls,
        grid: Grid,
        func: Callable[[np.ndarray, np.ndarray], np.ndarray],
        tail_exponent: float | None = None,
        params: dict[str, float] | None = None,
        tail_scale: float = 1.0,
    ) -> "SpaceTimeField":
        """Sample a closed-form u(r, t) on every slab of a grid."""
        tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
        return cls.from_values(grid, np.asarray(func(rr, tt), dtype=float), tail_exponent, params, tail_scale)

    @classmethod
    def from_values(
        cls,
        grid: Grid,
        values: np.ndarray,
        tail_exponent: float | None = None,
        params: dict[str, float] | None = None,
        tail_scale: float = 1.0,
    ) -> "SpaceTimeField":
        """Build a field from a (k, n_r + 1) array, finalizing its k slabs."""
        state = cls(grid, tail_exponent, params, tail_scale)
        for j, row in enumerate(np.asarray(values, dtype=float)):
            state.finalize(j, row)
        return state

    # ------------------------------------------------------------------
    # Slab bookkeeping
    # ------------------------------------------------------------------

    @property
    def finalized_count(self) -> int:
        return self._finalized

    @property
    def t_final(self) -> float:
        """Time of the last finalized slab (-dt when empty)."""
        return (self._finalized - 1) * self.grid.dt

    def is_finalized(self, j: int) -> bool:
        return 0 <= j < self._finalized

    def finalize(self, j: int, values: np.ndarray) -> None:
        """Freeze slab j.

        Raises:
            SequencingError: If slab j - 1 is not finalized or slab j already is.
            DomainError: If the values are not finite or have the wrong shape.
        """
        if j != self._finalized:
            raise SequencingError(f"slab {j} cannot be finalized before slab {self._finalized}")
        if j >= self.grid.n_t:
            raise SequencingError(f"slab {j} is beyond the grid horizon ({self.grid.n_t} slabs)")
        row = np.asarray(values, dtype=float)
        if row.shape != (self.grid.n_r + 1,):
            raise DomainError(f"slab must have {self.grid.n_r + 1} values, got shape {row.shape}")
        if not np.all(np.isfinite(row)):
            raise DomainError(f"slab {j} contains non-finite values")
        self._values[j] = row
        self._finalized += 1

    def slab(self, j: int) -> np.ndarray:
        """Read-only view of a finalized slab.

        Raises:
            SequencingError: If slab j is not finalized.
        """
        if not self.is_finalized(j):
            raise SequencingError(f"slab {j} is not finalized (finalized: {self._finalized})")
        view = self._values[j]
        view.flags.writeable = False
        return view

    @property
    def values(self) -> np.ndarray:
        """Read-only view of all finalized slabs, shape (finalized_count, n_r + 1)."""
        view = self._values[: self._finalized]
        view.flags.writeable = False
        return view

    # ------------------------------------------------------------------
    # Profiles and evaluation
    # ------------------------------------------------------------------

    def tail_amplitude(self, j: int, values: np.ndarray | None = None) -> float:
        """Amplitude A of the tail A <s r>^(-p) matched to the last node of a slab."""
        if self.tail_exponent is None:
            return 0.0
        row = self.slab(j) if values is None else values
        return float(row[-1] * japanese(self.tail_scale * self.grid.r_max) ** self.tail_exponent)

    def profile(self, j: int) -> RadialProfile:
        """Radial profile of slab j, with its matched tail."""
        tail = None
        if self.tail_exponent is not None:
            tail = TailSpec(self.tail_amplitude(j), self.tail_exponent, self.tail_scale)
        return RadialProfile(lam=self.grid.r, values=self.slab(j), tail=tail)

    def value_at(self, r: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Bilinear interpolation inside the finalized region."""
        if self._finalized < 2:
            raise SequencingError("interpolation needs at least two finalized slabs")
        interpolator = RegularGridInterpolator(
            (self.grid.t[: self._finalized], self.grid.r), self.values, bounds_error=True
        )
        points = np.column_stack([np.ravel(t), np.ravel(r)])
        return interpolator(points).reshape(np.shape(r))

    def negated(self) -> "SpaceTimeField":
        return SpaceTimeField.from_values(self.grid, -self.values, self.tail_exponent, self.params, self.tail_scale)

    # ------------------------------------------------------------------
    # Checkpoints
    # ------------------------------------------------------------------

    def save(self, path: Path | str, fmt: CheckpointFormat = "npz", header: dict[str, Any] | None = None) -> Path:
        """Write a checkpoint: grid header plus row-major finalized values."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        meta = {**self.grid.describe(), "support_radius": self.grid.support_radius, **(header or {})}
        meta["finalized"] = self._finalized
        meta["tail_exponent"] = self.tail_exponent
        meta["tail_scale"] = self.tail_scale
        meta["params"] = self.params
        if fmt == "npz":
            np.savez(
                path,
                values=self.values,
                r=self.grid.r,
                t=self.grid.t[: self._finalized],
                header=json.dumps(meta, sort_keys=True),
            )
        elif fmt == "csv":
            lines = [f"# {key}: {json.dumps(meta[key], sort_keys=True)}" for key in sorted(meta)]
            body = "\n".join(",".join(f"{v:.17g}" for v in row) for row in self.values)
            path.write_text("\n".join(lines) + "\n" + body + ("\n" if body else ""))
        else:
            raise DomainError(f"unknown checkpoint format: {fmt}")
        return path

    @classmethod
    def load(cls, path: Path | str) -> "SpaceTimeField":
        """Read a checkpoint written by save()."""
        path = Path(path)
        if path.suffix == ".npz":
            with np.load(path) as archive:
                meta = json.loads(str(archive["header"]))
                values = np.array(archive["values"])
        else:
            meta = {}
            rows = []
            for line in path.read_text().splitlines():
                if line.startswith("# "):
                    key, _, raw = line[2:].partition(": ")
                    meta[key] = json.loads(raw)
                elif line:
                    rows.append([float(v) for v in line.split(",")])
            values = np.array(rows)
        grid = Grid(dr=meta["dr"], t_max=meta["t_max"], r_max=meta["r_max"], support_radius=meta["support_radius"])
        tail = (meta.get("tail_exponent"), meta.get("params"), meta.get("tail_scale", 1.0))
        if values.size == 0:
            return cls(grid, *tail)
        return cls.from_values(grid, values, *tail)


@dataclass
class NonlinearityField:
    """N(r_i, s_j) = (V_gamma * u^2) u on the finalized slabs of a field."""

    grid: Grid
    values: np.ndarray = field(init=False)
    finalized_count: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self.values = np.zeros((self.grid.n_t, self.grid.n_r + 1))

    @classmethod
    def from_values(cls, grid: Grid, values: np.ndarray) -> "NonlinearityField":
        """Finalize all rows of a (k, n_r + 1) array."""
        state = cls(grid)
        for j, row in enumerate(np.asarray(values, dtype=float)):
            state.finalize(j, row)
        return state

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "NonlinearityField":
        tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
        return cls.from_values(grid, np.broadcast_to(func(rr, tt), tt.shape))

    def finalize(self, j: int, row: np.ndarray) -> None:
        if j != self.finalized_count:
            raise SequencingError(f"nonlinearity slab {j} cannot be finalized before slab {self.finalized_count}")
        self.values[j] = row
        self.finalized_count += 1

    def slab(self, j: int) -> np.ndarray:
        if not 0 <= j < self.finalized_count:
            raise SequencingError(f"nonlinearity slab {j} is not finalized (finalized: {self.finalized_count})")
        return self.values[j]


def estimate_to_dict(estimate: LifespanEstimate) -> dict[str, Any]:
    data = asdict(estimate)
    data["reason"] = estimate.reason.value
    return data

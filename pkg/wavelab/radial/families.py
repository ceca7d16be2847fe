"""Initial data sets and the named data families."""

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..errors import ConfigurationError, DomainError
from .grid import Grid
from .profile import RadialProfile, TailSpec, japanese

# Gaussian bumps are treated as supported where exp(-(x/w)^2) < 1e-16
GAUSSIAN_SUPPORT_WIDTHS = 6.1


@dataclass(frozen=True, eq=False)
class InitialDataSet:
    """Radial initial data (u0, u1) with their declared decay rate kappa."""

    u0: RadialProfile
    u1: RadialProfile
    kappa: float
    family: str = "custom"
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if self.u0.derivative is None:
            raise ConfigurationError("u0 must carry derivative samples (C^1 data)")
        for name, profile, expected in (("u0", self.u0, self.kappa), ("u1", self.u1, self.kappa + 1.0)):
            if profile.tail is not None and profile.tail.amplitude != 0.0:
                if not math.isclose(profile.tail.exponent, expected, rel_tol=1e-12, abs_tol=1e-12):
                    raise ConfigurationError(
                        f"{name} tail exponent {profile.tail.exponent} does not match kappa-derived {expected}"
                    )

    @property
    def tail_exponent(self) -> float | None:
        """Slowest declared decay rate among the non-zero tails."""
        exponents = [
            p.tail.exponent for p in (self.u0, self.u1) if p.tail is not None and p.tail.amplitude != 0.0
        ]
        return min(exponents) if exponents else None

    @property
    def tail_scale(self) -> float:
        """Length scale of the slowest non-zero tail (1 without tails)."""
        tails = [p.tail for p in (self.u0, self.u1) if p.tail is not None and p.tail.amplitude != 0.0]
        if not tails:
            return 1.0
        return min(tails, key=lambda tail: tail.exponent).scale

    @property
    def is_zero(self) -> bool:
        return self.u0.is_zero and self.u1.is_zero

    def sup_norm(self) -> float:
        """sup|u0| + sup|u1|, the data size used for default blow-up caps."""
        return self.u0.sup_abs() + self.u1.sup_abs()

    def rescaled(self, sigma: float, gamma: float) -> "InitialDataSet":
        """Data of the scaled solution sigma^((5-gamma)/2) u(sigma x, sigma t)."""
        shift = 0.5 * (5.0 - gamma)
        return InitialDataSet(
            u0=self.u0.rescaled(sigma, sigma**shift),
            u1=self.u1.rescaled(sigma, sigma ** (shift + 1.0)),
            kappa=self.kappa,
            family=self.family,
            params={**self.params, "sigma": sigma},
        )

    def regime(self, gamma: float) -> str:
        """Decay regime of the data relative to the critical rate (5 - gamma)/2."""
        critical = 0.5 * (5.0 - gamma)
        if math.isclose(self.kappa, critical, rel_tol=1e-12):
            return "critical"
        return "subcritical" if self.kappa < critical else "supercritical"


class DataFamily(Protocol):
    """A named, parametrized family of initial data."""

    name: str

    @property
    def support_radius(self) -> float: ...

    def build(self, lam: np.ndarray) -> InitialDataSet: ...


@dataclass(frozen=True)
class BlowupFamily:
    """u0 = 0, u1 = B <x>^(-(kappa + 1))."""

    amplitude: float
    kappa: float
    name: str = "blowup"

    def __post_init__(self) -> None:
        if not self.amplitude > 0:
            raise DomainError(f"blow-up amplitude B must be positive, got {self.amplitude}")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")

    @property
    def support_radius(self) -> float:
        # Non-compact; the grid margin only needs to cover the bulk of the data
        return 4.0

    def build(self, lam: np.ndarray) -> InitialDataSet:
        p = self.kappa + 1.0
        b = self.amplitude
        u1 = RadialProfile.from_function(
            lambda x: b * japanese(x) ** (-p),
            lam,
            tail=TailSpec(b, p),
            dfunc=lambda x: -p * b * x * japanese(x) ** (-p - 2.0),
        )
        zeros = np.zeros_like(lam)
        u0 = RadialProfile(lam=lam, values=zeros, derivative=zeros, tail=TailSpec(0.0, self.kappa))
        return InitialDataSet(u0=u0, u1=u1, kappa=self.kappa, family=self.name, params={"B": b, "kappa": self.kappa})


@dataclass(frozen=True)
class GaussianBump:
    """u0 = A exp(-(x/width)^2), u1 = 0."""

    amplitude: float
    width: float
    kappa: float = 1.5
    name: str = "gaussian"

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise DomainError(f"width must be positive, got {self.width}")

    @property
    def support_radius(self) -> float:
        return GAUSSIAN_SUPPORT_WIDTHS * self.width

    def build(self, lam: np.ndarray) -> InitialDataSet:
        a, w = self.amplitude, self.width
        u0 = RadialProfile.from_function(
            lambda x: a * np.exp(-np.square(x / w)),
            lam,
            dfunc=lambda x: -2.0 * a * x / w**2 * np.exp(-np.square(x / w)),
        )
        return InitialDataSet(
            u0=u0,
            u1=RadialProfile.zeros(lam),
            kappa=self.kappa,
            family=self.name,
            params={"A": a, "width": w},
        )


@dataclass(frozen=True)
class CompactBump:
    """u0 = A (1 - (x/R)^2)^2 on |x| < R, zero outside; u1 = 0."""

    amplitude: float
    radius: float
    kappa: float = 1.5
    name: str = "compact"

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")

    @property
    def support_radius(self) -> float:
        return self.radius

    def build(self, lam: np.ndarray) -> InitialDataSet:
        a, rad = self.amplitude, self.radius
        # Node on the support edge
        lam = np.union1d(lam, [rad])

        def bump(x: np.ndarray) -> np.ndarray:
            s = np.clip(1.0 - np.square(x / rad), 0.0, None)
            return a * s**2

        def dbump(x: np.ndarray) -> np.ndarray:
            s = np.clip(1.0 - np.square(x / rad), 0.0, None)
            return -4.0 * a * x / rad**2 * s

        u0 = RadialProfile.from_function(bump, lam, dfunc=dbump)
        return InitialDataSet(
            u0=u0,
            u1=RadialProfile.zeros(lam),
            kappa=self.kappa,
            family=self.name,
            params={"A": a, "radius": rad},
        )


def data_mesh(grid: Grid, oversample: int = 1) -> np.ndarray:
    """Sample mesh for initial data covering [0, r_max + t_max].

    The free propagator reads the data up to r + t; tails take over beyond it.
    """
    if oversample < 1:
        raise DomainError(f"oversample must be >= 1, got {oversample}")
    n = (grid.n_r + grid.n_t) * oversample
    return np.arange(n + 1, dtype=float) * (grid.dr / oversample)


def build_on_grid(family: DataFamily, grid: Grid, oversample: int = 1) -> InitialDataSet:
    """Instantiate a data family on the mesh matching a grid."""
    return family.build(data_mesh(grid, oversample))

"""The gamma-dependent convolution kernel and its closed forms."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import xlogy

from ..errors import DomainError, IntegrableSingularityError
from ..radial.profile import ArrayLike


class Regime(str, Enum):
    """Potential regimes relative to the critical exponent gamma = 2."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class Gamma:
    """Exponent of the potential V(x) = |x|^(-gamma), 0 < gamma < 3."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 < self.value < 3.0:
            raise DomainError(f"gamma must lie in (0, 3), got {self.value}")

    @property
    def regime(self) -> Regime:
        if self.value == 2.0:
            return Regime.CRITICAL
        return Regime.SUBCRITICAL if self.value < 2.0 else Regime.SUPERCRITICAL

    @property
    def is_log(self) -> bool:
        """True when the kernel antiderivative takes its logarithmic branch."""
        return self.value == 2.0

    @property
    def beta(self) -> float:
        """Antiderivative exponent 2 - gamma."""
        return 2.0 - self.value

    def __float__(self) -> float:
        return self.value


def as_gamma(gamma: "Gamma | float") -> Gamma:
    return gamma if isinstance(gamma, Gamma) else Gamma(float(gamma))


@dataclass(frozen=True)
class KernelClosedForm:
    """K(r, rho) = integral_{|r-rho|}^{r+rho} eta^(1-gamma) d eta in closed form."""

    gamma: Gamma

    def values(self, r: np.ndarray, rho: np.ndarray) -> np.ndarray:
        """Kernel values, evaluated without cancellation for rho >> r or r >> rho.

        The diagonal r = rho is +inf for gamma >= 2.
        """
        r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
        small = np.minimum(r, rho)
        gap = np.abs(r - rho)
        beta = self.gamma.beta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = 2.0 * small / gap
            if self.gamma.is_log:
                out = np.log1p(ratio)
            else:
                out = gap**beta * np.expm1(beta * np.log1p(ratio)) / beta
            diagonal = gap == 0.0
            if np.any(diagonal):
                on_diag = (r + rho) ** beta / beta if beta > 0 else np.full(r.shape, np.inf)
                out = np.where(diagonal & (small > 0), on_diag, out)
                out = np.where(diagonal & (small == 0), 0.0, out)
        return out

    def primitive(self, r: np.ndarray, rho: np.ndarray) -> np.ndarray:
        """An antiderivative of K(r, .) in rho; finite across the diagonal."""
        r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
        total = r + rho
        offset = rho - r
        if self.gamma.is_log:
            return xlogy(total, total) - np.sign(offset) * xlogy(np.abs(offset), np.abs(offset)) - 2.0 * r
        beta = self.gamma.beta
        return (total ** (beta + 1.0) - np.sign(offset) * np.abs(offset) ** (beta + 1.0)) / (beta * (beta + 1.0))

    def cell_integrals(self, r: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Exact integral of K(r, rho) over [left, right]."""
        return self.primitive(r, right) - self.primitive(r, left)


def kernel_integral(gamma: "Gamma | float", r: ArrayLike, rho: ArrayLike) -> ArrayLike:
    """Closed form of integral_{|r-rho|}^{r+rho} eta^(1-gamma) d eta.

    Args:
        gamma: Potential exponent.
        r: Evaluation radius, r > 0.
        rho: Source radius, rho > 0.

    Returns:
        log((r+rho)/|r-rho|) for gamma = 2, ((r+rho)^(2-gamma) - |r-rho|^(2-gamma))/(2-gamma) otherwise.

    Raises:
        DomainError: If r or rho is not positive.
        IntegrableSingularityError: If r = rho and gamma >= 2.
    """
    g = as_gamma(gamma)
    scalar = np.ndim(r) == 0 and np.ndim(rho) == 0
    r_arr = np.asarray(r, dtype=float)
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(r_arr <= 0) or np.any(rho_arr <= 0):
        raise DomainError("kernel_integral requires r > 0 and rho > 0")
    if g.value >= 2.0 and np.any(r_arr == rho_arr):
        raise IntegrableSingularityError(
            f"kernel is singular at r = rho for gamma={g.value}; integrate the cell analytically"
        )
    out = KernelClosedForm(g).values(r_arr, rho_arr)
    return float(out) if scalar else out


def origin_cell_integrals(gamma: Gamma, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Exact integral of rho^(2-gamma) over [left, right], used for the r = 0 limit."""
    power = 3.0 - gamma.value
    return (right**power - left**power) / power


def integrable_tail(gamma: Gamma, density_exponent: float) -> bool:
    """Whether rho^(2-gamma) * rho^(-q) is integrable at infinity."""
    return density_exponent + gamma.value - 2.0 > 1.0 and math.isfinite(density_exponent)

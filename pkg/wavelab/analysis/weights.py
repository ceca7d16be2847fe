"""Light-cone weights <t+r>^a <t-r>^b (1 + log<t+r>)^(-l)."""

import math
from dataclasses import dataclass, replace

import numpy as np

from ..convolution.kernel import Gamma, as_gamma
from ..errors import DomainError
from ..radial.profile import ArrayLike, japanese


@dataclass(frozen=True)
class WeightSpec:
    """Divisor weight w(r, t): a bound of the form |f| <= C/w is checked as sup |f| w."""

    a: float
    b: float
    l: int = 0
    name: str = "custom"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("weight exponents must be finite")
        if self.l < 0:
            raise DomainError(f"log power l must be >= 0, got {self.l}")

    def __call__(self, r: ArrayLike, t: ArrayLike) -> ArrayLike:
        plus = japanese(np.add(t, r))
        minus = japanese(np.subtract(t, r))
        out = plus**self.a * minus**self.b
        if self.l:
            out = out / (1.0 + np.log(plus)) ** self.l
        return out

    def without_log(self) -> "WeightSpec":
        return replace(self, l=0, name=f"{self.name}_no_log")

    # Presets ----------------------------------------------------------

    @classmethod
    def x_norm(cls, gamma: "Gamma | float") -> "WeightSpec":
        """<t+r> <t-r>^((3-gamma)/2)."""
        g = as_gamma(gamma)
        return cls(1.0, 0.5 * (3.0 - g.value), 0, "x_norm")

    @classmethod
    def potential_critical(cls) -> "WeightSpec":
        """gamma = 2: <t+r>^(7/4) <t-r>^(1/4) / (1 + log<t+r>)."""
        return cls(1.75, 0.25, 1, "potential_critical")

    @classmethod
    def potential_supercritical(cls, gamma: "Gamma | float") -> "WeightSpec":
        """2 < gamma < 3: <t+r>^((5+gamma)/4) <t-r>^((3-gamma)/4)."""
        g = as_gamma(gamma)
        return cls(0.25 * (5.0 + g.value), 0.25 * (3.0 - g.value), 0, "potential_supercritical")

    @classmethod
    def potential_weak_log2(cls) -> "WeightSpec":
        """gamma = 2: <t+r>^2 / (1 + log<t+r>)^2."""
        return cls(2.0, 0.0, 2, "potential_weak_log2")

    @classmethod
    def potential_weakened(cls) -> "WeightSpec":
        """Critical weight with the <t-r> exponent raised to 1/2."""
        return cls(1.75, 0.5, 1, "potential_weakened")

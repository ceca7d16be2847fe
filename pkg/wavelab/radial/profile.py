"""Radial profiles: sampled functions of |x| with power-law tails."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from ..errors import DomainError

ArrayLike = float | np.ndarray
RadialFunction = Callable[[np.ndarray], np.ndarray]


def japanese(x: ArrayLike) -> ArrayLike:
    """The bracket <x> = sqrt(1 + x^2)."""
    return np.sqrt(1.0 + np.square(x))


def _as_output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values.reshape(-1)[0]) if scalar else values


@dataclass(frozen=True)
class TailSpec:
    """Power-law tail A * <scale * lambda>^(-exponent) beyond the sampled range."""

    amplitude: float
    exponent: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.exponent > 0:
            raise DomainError(f"tail exponent must be positive, got {self.exponent}")
        if not self.scale > 0:
            raise DomainError(f"tail scale must be positive, got {self.scale}")

    def value(self, lam: np.ndarray) -> np.ndarray:
        return self.amplitude * (1.0 + np.square(self.scale * lam)) ** (-0.5 * self.exponent)

    def derivative(self, lam: np.ndarray) -> np.ndarray:
        s2 = self.scale**2
        return -self.exponent * self.amplitude * s2 * lam * (1.0 + s2 * np.square(lam)) ** (-0.5 * self.exponent - 1.0)

    def moment_primitive(self, lam: np.ndarray) -> np.ndarray:
        """Primitive of lambda * value(lambda)."""
        s2 = self.scale**2
        base = 1.0 + s2 * np.square(lam)
        if math.isclose(self.exponent, 2.0, rel_tol=0.0, abs_tol=1e-14):
            return self.amplitude / (2.0 * s2) * np.log(base)
        power = 1.0 - 0.5 * self.exponent
        return self.amplitude / (2.0 * s2 * power) * base**power

    def weighted_sup(self, start: float, power: float, homogeneous: bool = False) -> float:
        """Supremum over lambda >= start of w(lambda)^power * |tail(lambda)|.

        Args:
            start: Left end of the tail region.
            power: Exponent on the weight.
            homogeneous: Use w = lambda instead of w = <lambda>.

        Returns:
            The supremum, possibly inf when the weight outgrows the tail.
        """
        a = abs(self.amplitude)
        if a == 0.0:
            return 0.0
        p, s2 = self.exponent, self.scale**2

        def h(lam: float) -> float:
            w = lam if homogeneous else math.sqrt(1.0 + lam * lam)
            return (w**power if w > 0 else (1.0 if power == 0 else 0.0)) * a * (1.0 + s2 * lam * lam) ** (-0.5 * p)

        candidates = [h(start)]
        if homogeneous:
            if p > power and power > 0:
                critical = math.sqrt(power / (s2 * (p - power)))
                if critical > start:
                    candidates.append(h(critical))
        elif not math.isclose(power, p) and (p * s2 - power) / (s2 * (power - p)) > 0:
            critical = math.sqrt((p * s2 - power) / (s2 * (power - p)))
            if critical > start:
                candidates.append(h(critical))

        if power > p:
            return math.inf
        if math.isclose(power, p):
            candidates.append(a * self.scale ** (-p))
        return max(candidates)

    def scaled(self, factor: float, sigma: float = 1.0) -> "TailSpec":
        """Tail of factor * f(sigma * lambda)."""
        return TailSpec(self.amplitude * factor, self.exponent, self.scale * sigma)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A function of the radial variable sampled on lambda_0 = 0 < lambda_1 < ...

    Values are interpolated piecewise-linearly. Integrals of lambda * f are exact
    for the interpolant, and the declared tail is integrated in closed form.
    """

    lam: np.ndarray
    values: np.ndarray
    derivative: np.ndarray | None = None
    tail: TailSpec | None = None
    _moments: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        lam = np.array(self.lam, dtype=float)
        values = np.array(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != values.shape or lam.size < 2:
            raise DomainError("profile samples must be two 1-D arrays of equal length >= 2")
        if lam[0] != 0.0:
            raise DomainError(f"profile mesh must start at lambda=0, got {lam[0]}")
        if np.any(np.diff(lam) <= 0):
            raise DomainError("profile mesh must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(lam))):
            raise DomainError("profile samples must be finite")

        derivative = None
        if self.derivative is not None:
            derivative = np.array(self.derivative, dtype=float)
            if derivative.shape != lam.shape:
                raise DomainError("derivative samples must match the mesh")
            derivative.setflags(write=False)

        lam.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivative", derivative)

        # Simpson per segment is exact for lambda * (linear interpolant)
        width = np.diff(lam)
        mid = 0.5 * (lam[:-1] + lam[1:])
        f = lam * values
        fm = mid * 0.5 * (values[:-1] + values[1:])
        segments = width / 6.0 * (f[:-1] + 4.0 * fm + f[1:])
        moments = np.concatenate(([0.0], np.cumsum(segments)))
        moments.setflags(write=False)
        object.__setattr__(self, "_moments", moments)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_function(
        cls,
        func: RadialFunction,
        lam: np.ndarray,
        tail: TailSpec | None = None,
        dfunc: RadialFunction | None = None,
    ) -> "RadialProfile":
        """Sample a closed-form radial function on a mesh."""
        lam = np.asarray(lam, dtype=float)
        derivative = None if dfunc is None else dfunc(lam)
        return cls(lam=lam, values=func(lam), derivative=derivative, tail=tail)

    @classmethod
    def zeros(cls, lam: np.ndarray) -> "RadialProfile":
        lam = np.asarray(lam, dtype=float)
        return cls(lam=lam, values=np.zeros_like(lam), derivative=np.zeros_like(lam))

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    @property
    def r_max(self) -> float:
        """Last sampled radius."""
        return float(self.lam[-1])

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values) and (self.tail is None or self.tail.amplitude == 0.0)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.interp(xs, self.lam, self.values, right=0.0)
        beyond = xs > self.r_max
        if self.tail is not None and np.any(beyond):
            out[beyond] = self.tail.value(xs[beyond])
        return _as_output(out, scalar)

    def slope(self, x: ArrayLike) -> ArrayLike:
        """First derivative, from the stored samples or the interpolant."""
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        samples = self.derivative if self.derivative is not None else np.gradient(self.values, self.lam)
        out = np.interp(xs, self.lam, samples, right=0.0)
        beyond = xs > self.r_max
        if self.tail is not None and np.any(beyond):
            out[beyond] = self.tail.derivative(xs[beyond])
        return _as_output(out, scalar)

    def antiderivative(self, x: ArrayLike) -> ArrayLike:
        """G(x) = integral of lambda * f(lambda) over [0, x]."""
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xs < 0):
            raise DomainError("antiderivative is defined for x >= 0 only")

        inside = np.minimum(xs, self.r_max)
        k = np.clip(np.searchsorted(self.lam, inside, side="right") - 1, 0, self.lam.size - 2)
        left = self.lam[k]
        v_left = self.values[k]
        v_x = np.interp(inside, self.lam, self.values)
        mid = 0.5 * (left + inside)
        v_mid = 0.5 * (v_left + v_x)
        partial = (inside - left) / 6.0 * (left * v_left + 4.0 * mid * v_mid + inside * v_x)
        out = self._moments[k] + partial

        beyond = xs > self.r_max
        if self.tail is not None and np.any(beyond):
            edge = np.array([self.r_max])
            out[beyond] += self.tail.moment_primitive(xs[beyond]) - self.tail.moment_primitive(edge)[0]
        return _as_output(out, scalar)

    def moment(self, a: ArrayLike, b: ArrayLike) -> ArrayLike:
        """Integral of lambda * f(lambda) over [a, b]."""
        return np.subtract(self.antiderivative(b), self.antiderivative(a))

    def sup_abs(self) -> float:
        """Supremum of |f|, including the tail."""
        nodal = float(np.max(np.abs(self.values)))
        if self.tail is None:
            return nodal
        return max(nodal, self.tail.weighted_sup(self.r_max, 0.0))

    # ------------------------------------------------------------------
    # Transformations and export
    # ------------------------------------------------------------------

    def rescaled(self, sigma: float, factor: float = 1.0) -> "RadialProfile":
        """Profile of factor * f(sigma * lambda), with an exact tail."""
        if sigma <= 0:
            raise DomainError(f"sigma must be positive, got {sigma}")
        derivative = None if self.derivative is None else self.derivative * factor * sigma
        tail = None if self.tail is None else self.tail.scaled(factor, sigma)
        return RadialProfile(lam=self.lam / sigma, values=self.values * factor, derivative=derivative, tail=tail)

    def to_csv(self, path: Path | str, metadata: dict[str, Any] | None = None) -> Path:
        """Write the samples as a two-column CSV (lambda,value) below `# key: value` metadata lines."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = [f"# {key}: {json.dumps(value)}" for key, value in (metadata or {}).items()]
        if self.tail is not None:
            header.append(f"# tail: {json.dumps([self.tail.amplitude, self.tail.exponent, self.tail.scale])}")
        header.append("lambda,value")
        table = np.column_stack([self.lam, self.values])
        np.savetxt(path, table, delimiter=",", header="\n".join(header), comments="", fmt="%.17g")
        return path

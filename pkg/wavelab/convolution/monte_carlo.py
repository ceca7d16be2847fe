"""Importance-sampled 3D Monte-Carlo oracle for the Hartree potential."""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..radial.families import BlowupFamily, GaussianBump
from ..radial.profile import RadialProfile
from .kernel import Gamma, as_gamma, integrable_tail

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
CHUNK_SIZE = 200_000
# Oracle profiles are sampled on [0, 16] with step 1/32
ORACLE_MESH = np.arange(0.0, 16.0 + 1e-12, 1.0 / 32.0)


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Mean and standard error of an importance-sampled integral."""

    mean: float
    stderr: float
    n_samples: int

    def agrees_with(self, value: float, sigmas: float = 3.0) -> bool:
        """Check |value - mean| <= sigmas * stderr."""
        return abs(value - self.mean) <= sigmas * self.stderr

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class OracleCase:
    """One random (profile, gamma, r) cross-check of the deterministic potential."""

    index: int
    family: str
    gamma: float
    r: float
    profile: RadialProfile


def draw_oracle_cases(n_cases: int, gammas: list[float], seed: int) -> list[OracleCase]:
    """Draw alternating Gaussian and tailed blow-up profiles with random gamma and r.

    Args:
        n_cases: Number of cases.
        gammas: Exponents drawn uniformly from.
        seed: Seed for numpy's default generator.

    Returns:
        Cases in draw order; case i is Gaussian for even i.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for index in range(n_cases):
        gamma = float(rng.choice(gammas))
        r = float(rng.uniform(0.0, 4.0))
        if index % 2 == 0:
            family = "gaussian"
            profile = GaussianBump(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))).build(ORACLE_MESH).u0
        else:
            family = "blowup"
            profile = BlowupFamily(amplitude=float(rng.uniform(0.5, 2.0)), kappa=1.5).build(ORACLE_MESH).u1
        cases.append(OracleCase(index, family, gamma, r, profile))
    return cases


def _support_radius(u: RadialProfile) -> float:
    nonzero = np.flatnonzero(u.values)
    if nonzero.size == 0:
        return float(u.lam[1])
    last = min(int(nonzero[-1]) + 1, u.lam.size - 1)
    return float(u.lam[last])


def _directions(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def hartree_potential_mc(
    u: RadialProfile,
    gamma: "Gamma | float",
    r: float,
    n_samples: int,
    seed: int,
) -> MonteCarloEstimate:
    """Monte-Carlo estimate of integral_{R^3} u(|z|)^2 / |y - z|^gamma dz with |y| = r.

    Samples from a mixture of a uniform ball covering the data, a |z - y|^(-gamma)
    radial density around the evaluation point, and (for tailed profiles) a
    power-law exterior density.

    Args:
        u: Radial profile.
        gamma: Potential exponent.
        r: Radius of the evaluation point.
        n_samples: Number of samples, at least 10^4.
        seed: Seed for numpy's default generator; identical seeds give identical estimates.

    Returns:
        MonteCarloEstimate with mean and standard error.

    Raises:
        DomainError: If n_samples < 10^4 or r < 0.
    """
    g = as_gamma(gamma)
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}, got {n_samples}")
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r}")
    if u.is_zero:
        return MonteCarloEstimate(0.0, 0.0, n_samples)

    rng = np.random.default_rng(seed)
    y = np.array([0.0, 0.0, r])
    has_tail = u.tail is not None and u.tail.amplitude != 0.0
    ball = u.r_max if has_tail else _support_radius(u)
    near = 0.5 * max(ball, 1e-3)

    if has_tail:
        assert u.tail is not None
        density_exponent = 2.0 * u.tail.exponent
        if not integrable_tail(g, density_exponent):
            raise ConfigurationError(f"tail of u is not square-integrable against |x|^-{g.value}")
        mu = 0.5 * (density_exponent + g.value - 3.0)
        mix = np.array([0.5, 0.4, 0.1])
    else:
        mu = 1.0
        mix = np.array([0.55, 0.45, 0.0])

    ball_density = 1.0 / (4.0 / 3.0 * math.pi * ball**3)
    near_norm = (3.0 - g.value) / (4.0 * math.pi * near ** (3.0 - g.value))
    tail_norm = mu * ball**mu / (4.0 * math.pi)

    total = 0.0
    total_sq = 0.0
    remaining = n_samples
    while remaining > 0:
        n = min(CHUNK_SIZE, remaining)
        remaining -= n
        component = rng.choice(3, size=n, p=mix)
        radius = np.empty(n)
        counts = [int(np.sum(component == k)) for k in range(3)]
        radius[component == 0] = ball * rng.random(counts[0]) ** (1.0 / 3.0)
        radius[component == 1] = near * rng.random(counts[1]) ** (1.0 / (3.0 - g.value))
        radius[component == 2] = ball * (1.0 - rng.random(counts[2])) ** (-1.0 / mu)
        z = radius[:, None] * _directions(rng, n)
        z[component == 1] += y

        norm_z = np.linalg.norm(z, axis=1)
        dist = np.linalg.norm(z - y, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (
                mix[0] * ball_density * (norm_z < ball)
                + mix[1] * near_norm * dist ** (-g.value) * (dist < near)
                + mix[2] * tail_norm * norm_z ** (-3.0 - mu) * (norm_z >= ball)
            )
            f = np.square(np.asarray(u(norm_z))) * dist ** (-g.value)
            ratio = np.where(q > 0, f / q, 0.0)
        ratio = np.nan_to_num(ratio, nan=0.0, posinf=0.0)
        total += float(np.sum(ratio))
        total_sq += float(np.sum(ratio * ratio))

    mean = total / n_samples
    variance = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    estimate = MonteCarloEstimate(mean, math.sqrt(variance / n_samples), n_samples)
    logger.debug(f"MC potential at r={r}, gamma={g.value}: {estimate.mean:.6g} +/- {estimate.stderr:.2g}")
    return estimate

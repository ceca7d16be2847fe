"""Hartree potential (V_gamma * u^2)(r) for radial u via the one-dimensional reduction."""

import logging
import math

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from ..errors import ConfigurationError, DomainError
from ..radial.profile import ArrayLike, RadialProfile, TailSpec
from .kernel import Gamma, KernelClosedForm, as_gamma, integrable_tail, origin_cell_integrals

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

# Cells within this many widths of the target get the exact kernel integral
NEAR_CELL_WIDTHS = 2.0

# Tail blocks [a, 2a] are summed until a block adds less than this fraction
TAIL_TRUNCATION = 1e-14
TAIL_MAX_RADIUS = 1e15
GAUSS_LEGENDRE_ORDER = 16


def _kernel_over_r(kernel: KernelClosedForm, r: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """K(r, rho)/r with its r -> 0 limit 2 rho^(1-gamma)."""
    r, rho = np.broadcast_arrays(r, rho)
    out = np.empty(r.shape)
    origin = r == 0.0
    out[origin] = 2.0 * rho[origin] ** (1.0 - kernel.gamma.value)
    out[~origin] = kernel.values(r[~origin], rho[~origin]) / r[~origin]
    return out


def tail_integrals(targets: np.ndarray, start: float, tail: TailSpec, gamma: Gamma) -> np.ndarray:
    """Potential contribution of a power-law density tail beyond `start`.

    For each target r, returns 2 pi integral_{start}^inf rho q(rho) K(r, rho)/r d rho, where
    q(rho) = <scale rho>^(-exponent) is the density tail with unit amplitude.

    Raises:
        ConfigurationError: If the tail is not integrable against the kernel.
    """
    if not integrable_tail(gamma, tail.exponent):
        raise ConfigurationError(
            f"density tail exponent {tail.exponent} is not integrable for gamma={gamma.value} "
            "(need 2*kappa + gamma - 2 > 1)"
        )
    targets = np.asarray(targets, dtype=float)
    unit = TailSpec(1.0, tail.exponent, tail.scale)
    kernel = KernelClosedForm(gamma)
    out = np.zeros(targets.shape)

    inner = targets < start * (1.0 - 1e-12)
    if np.any(inner):
        out[inner] = _tail_blocks(targets[inner], start, unit, kernel)
    for index in np.flatnonzero(~inner):
        out[index] = _tail_quad(float(targets[index]), start, unit, kernel)
    return TWO_PI * out


def _tail_blocks(targets: np.ndarray, start: float, unit: TailSpec, kernel: KernelClosedForm) -> np.ndarray:
    nodes, weights = roots_legendre(GAUSS_LEGENDRE_ORDER)

    def block(left: float, right: float) -> np.ndarray:
        rho = 0.5 * (left + right) + 0.5 * (right - left) * nodes
        integrand = rho * unit.value(rho) * _kernel_over_r(kernel, targets[:, None], rho[None, :])
        return 0.5 * (right - left) * (integrand @ weights)

    # Graded blocks on [start, 2 start] resolve targets just inside the mesh end
    edges = np.concatenate(([start], start * (1.0 + 2.0 ** -np.arange(40, -1, -1, dtype=float))))
    total = np.zeros(targets.shape)
    for left, right in zip(edges[:-1], edges[1:]):
        total += block(float(left), float(right))

    left = 2.0 * start
    while left < TAIL_MAX_RADIUS:
        contribution = block(left, 2.0 * left)
        total += contribution
        if np.all(np.abs(contribution) <= TAIL_TRUNCATION * np.abs(total)):
            break
        left *= 2.0
    return total


def _tail_quad(target: float, start: float, unit: TailSpec, kernel: KernelClosedForm) -> float:
    def integrand(rho: float) -> float:
        arr = np.array([rho])
        return float(rho * unit.value(arr)[0] * _kernel_over_r(kernel, np.array([target]), arr)[0])

    pieces = [(start, target), (target, 2.0 * target + start), (2.0 * target + start, np.inf)]
    total = 0.0
    for a, b in pieces:
        if b > a:
            value, _ = integrate.quad(integrand, a, b, limit=200, epsabs=0.0, epsrel=1e-12)
            total += value
    return total


class ConvolutionOperator:
    """Precomputed quadrature mapping nodal values on a mesh to potentials at target radii.

    Within each mesh cell the product rho * u^2 is frozen at the cell center; the kernel
    is integrated exactly on cells near the target (including the singular one) and by
    the midpoint rule elsewhere. At r = 0 the limit 4 pi integral rho^(2-gamma) u^2 is used.
    """

    def __init__(
        self,
        mesh: np.ndarray,
        targets: np.ndarray,
        gamma: "Gamma | float",
        density_tail: TailSpec | None = None,
    ):
        """Initialize the operator.

        Args:
            mesh: Strictly increasing sample radii starting at 0.
            targets: Radii where the potential is evaluated.
            gamma: Potential exponent.
            density_tail: Unit-amplitude tail exponent/scale of the density beyond the mesh.
        """
        self.gamma = as_gamma(gamma)
        self.mesh = np.asarray(mesh, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        if self.mesh[0] != 0.0 or np.any(np.diff(self.mesh) <= 0):
            raise DomainError("convolution mesh must start at 0 and be strictly increasing")
        if np.any(self.targets < 0):
            raise DomainError("targets must be non-negative")

        self.density_tail = density_tail
        self.weights = self._cell_weights()
        self.tail_weights = (
            tail_integrals(self.targets, float(self.mesh[-1]), density_tail, self.gamma)
            if density_tail is not None
            else np.zeros(self.targets.shape)
        )
        logger.debug(
            f"Built convolution operator: {self.targets.size} targets x {self.mesh.size - 1} cells, "
            f"gamma={self.gamma.value}"
        )

    @classmethod
    def on_nodes(
        cls, nodes: np.ndarray, gamma: "Gamma | float", density_tail: TailSpec | None = None
    ) -> "ConvolutionOperator":
        """Operator whose targets are the mesh nodes themselves (the slab case)."""
        return cls(nodes, nodes, gamma, density_tail)

    def _cell_weights(self) -> np.ndarray:
        kernel = KernelClosedForm(self.gamma)
        left, right = self.mesh[:-1], self.mesh[1:]
        width = right - left
        center = 0.5 * (left + right)

        r = self.targets[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            per_cell = width[None, :] * kernel.values(r, center[None, :])
        near = np.abs(center[None, :] - r) <= NEAR_CELL_WIDTHS * width[None, :]
        rows, cols = np.nonzero(near)
        per_cell[rows, cols] = kernel.cell_integrals(self.targets[rows], left[cols], right[cols])

        weights = np.empty(per_cell.shape)
        positive = self.targets > 0
        weights[positive] = TWO_PI * center[None, :] * per_cell[positive] / self.targets[positive, None]
        weights[~positive] = FOUR_PI * origin_cell_integrals(self.gamma, left, right)[None, :]
        return weights

    def centers(self, values: np.ndarray) -> np.ndarray:
        """Linear-interpolant values at the cell centers."""
        values = np.asarray(values, dtype=float)
        return 0.5 * (values[..., :-1] + values[..., 1:])

    def apply(
        self,
        values: np.ndarray,
        partner: np.ndarray | None = None,
        tail_amplitude: float = 0.0,
    ) -> np.ndarray:
        """Potential of the density u^2 (or u * partner) at every target.

        Args:
            values: Nodal values of u on the mesh.
            partner: Optional nodal values of a second factor.
            tail_amplitude: Amplitude of the density tail beyond the mesh.

        Returns:
            Array of potentials, one per target.
        """
        u_c = self.centers(values)
        density = u_c * (self.centers(partner) if partner is not None else u_c)
        out = self.weights @ density
        if tail_amplitude:
            out = out + tail_amplitude * self.tail_weights
        return out


def refine_mesh(lam: np.ndarray, max_cell: float | None) -> np.ndarray:
    """Subdivide mesh segments so that no cell exceeds max_cell."""
    lam = np.asarray(lam, dtype=float)
    if max_cell is None:
        return lam
    if max_cell <= 0:
        raise DomainError(f"max_cell must be positive, got {max_cell}")
    widths = np.diff(lam)
    parts = np.maximum(1, np.ceil(widths / max_cell - 1e-12).astype(int))
    starts = np.repeat(lam[:-1], parts)
    steps = np.repeat(widths / parts, parts)
    offsets = np.concatenate([np.arange(p) for p in parts])
    return np.append(starts + offsets * steps, lam[-1])


def density_tail(u: RadialProfile, partner: RadialProfile | None = None) -> tuple[TailSpec | None, float]:
    """Unit tail and amplitude of the density u^2 (or u * partner).

    Raises:
        ConfigurationError: If the two tails use different length scales.
    """
    other = partner if partner is not None else u
    if u.tail is None or other.tail is None or u.tail.amplitude == 0.0 or other.tail.amplitude == 0.0:
        return None, 0.0
    if not math.isclose(u.tail.scale, other.tail.scale):
        raise ConfigurationError("density factors must share a tail scale")
    unit = TailSpec(1.0, u.tail.exponent + other.tail.exponent, u.tail.scale)
    return unit, u.tail.amplitude * other.tail.amplitude


def hartree_potential(
    u_slab: RadialProfile,
    gamma: "Gamma | float",
    r: ArrayLike,
    partner: RadialProfile | None = None,
    max_cell: float | None = None,
) -> ArrayLike:
    """(V_gamma * u^2)(r) = (2 pi / r) integral rho u^2(rho) K_gamma(r, rho) d rho.

    Args:
        u_slab: Radial profile of u at a fixed time.
        gamma: Potential exponent.
        r: Evaluation radius (or array of radii), r >= 0.
        partner: Optional second profile; the density becomes u * partner.
        max_cell: Optional refinement of the profile mesh before quadrature.

    Returns:
        Potential value(s); 4 pi integral rho^(2-gamma) u^2 at r = 0.

    Raises:
        ConfigurationError: If the tail density is not integrable (2 kappa + gamma - 2 <= 1).
    """
    g = as_gamma(gamma)
    scalar = np.ndim(r) == 0
    targets = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(targets < 0):
        raise DomainError("r must be non-negative")

    unit_tail, amplitude = density_tail(u_slab, partner)
    if unit_tail is not None and not integrable_tail(g, unit_tail.exponent):
        raise ConfigurationError(
            f"tail density exponent {unit_tail.exponent} is not integrable for gamma={g.value} "
            "(need 2*kappa + gamma - 2 > 1)"
        )

    if u_slab.is_zero or (partner is not None and partner.is_zero):
        out = np.zeros(targets.shape)
        return float(out[0]) if scalar else out

    lam = u_slab.lam if partner is None else np.union1d(u_slab.lam, partner.lam)
    mesh = refine_mesh(lam, max_cell)
    operator = ConvolutionOperator(mesh, targets, g, unit_tail)
    values = np.asarray(u_slab(mesh))
    partner_values = None if partner is None else np.asarray(partner(mesh))
    out = operator.apply(values, partner_values, amplitude)
    return float(out[0]) if scalar else out

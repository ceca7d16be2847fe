"""Causal slab solver for u = eps*u0 + L((V_gamma * u^2) u)."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..convolution.kernel import Gamma, as_gamma, integrable_tail
from ..convolution.potential import ConvolutionOperator
from ..errors import ConfigurationError, DomainError
from ..radial.families import InitialDataSet
from ..radial.grid import Grid
from ..radial.profile import TailSpec, japanese
from ..radial.propagator import free_solution_grid
from .duhamel import DuhamelAccumulator
from .field import LifespanEstimate, NonlinearityField, SpaceTimeField, TerminationReason

logger = logging.getLogger(__name__)

# Default blow-up cap is this multiple of eps * (sup|u0| + sup|u1|)
DEFAULT_CAP_FACTOR = 1e6


@dataclass(frozen=True)
class SolverOptions:
    """Tuning knobs for the slab solver."""

    value_cap: float | None = None
    full_picard: bool = False
    picard_tolerance: float = 1e-10
    max_picard_iterations: int = 50
    divergence_ratio: float = 0.5
    nonlinear: bool = True

    def __post_init__(self) -> None:
        if self.value_cap is not None and not self.value_cap > 0:
            raise DomainError(f"value_cap must be positive, got {self.value_cap}")
        if self.max_picard_iterations < 1:
            raise DomainError("max_picard_iterations must be >= 1")
        if not self.picard_tolerance > 0 or not self.divergence_ratio > 0:
            raise DomainError("picard_tolerance and divergence_ratio must be positive")


@dataclass
class SlabOutcome:
    """Result of one slab step; divergence is a signal, not an exception."""

    slab: int
    converged: bool
    iterations: int
    correction: float
    norm_history: list[float] = field(default_factory=list)
    reason: TerminationReason | None = None


def default_value_cap(data: InitialDataSet, eps: float) -> float:
    size = eps * data.sup_norm()
    return DEFAULT_CAP_FACTOR * size if size > 0 else math.inf


class SolverState:
    """Everything the slab march carries: field, nonlinearity, Duhamel sums and the operator."""

    def __init__(
        self,
        data: InitialDataSet,
        eps: float,
        gamma: "Gamma | float",
        grid: Grid,
        options: SolverOptions | None = None,
    ):
        if eps < 0:
            raise DomainError(f"eps must be non-negative, got {eps}")
        self.data = data
        self.eps = eps
        self.gamma = as_gamma(gamma)
        self.grid = grid
        self.options = options or SolverOptions()
        self.value_cap = self.options.value_cap if self.options.value_cap is not None else default_value_cap(data, eps)
        if eps > 0 and self.value_cap <= eps * max(data.u0.sup_abs(), 0.0):
            raise DomainError(f"value_cap={self.value_cap} does not exceed the initial data size")

        self.tail_exponent = data.tail_exponent
        self.tail_scale = data.tail_scale
        density_tail = None
        if self.tail_exponent is not None:
            density_tail = TailSpec(1.0, 2.0 * self.tail_exponent, self.tail_scale)
            if not integrable_tail(self.gamma, density_tail.exponent):
                raise ConfigurationError(
                    f"data decay kappa={data.kappa} gives a non-integrable potential for gamma={self.gamma.value}"
                )

        self.free = free_solution_grid(data, eps, grid)
        self.operator = ConvolutionOperator.on_nodes(grid.r, self.gamma, density_tail)
        self.field = SpaceTimeField(
            grid,
            tail_exponent=self.tail_exponent,
            tail_scale=self.tail_scale,
            params={"eps": eps, "gamma": self.gamma.value, "kappa": data.kappa, **data.params},
        )
        self.nonlinearity = NonlinearityField(grid)
        self.accumulator = DuhamelAccumulator(grid)
        self.x_norm_history: list[float] = []

    def nonlinearity_of(self, values: np.ndarray) -> np.ndarray:
        """N = (V_gamma * u^2) u on one slab, with the matched density tail."""
        if not self.options.nonlinear:
            return np.zeros_like(values)
        amplitude = 0.0
        if self.tail_exponent is not None:
            amplitude = self.field.tail_amplitude(0, values) ** 2
        return self.operator.apply(values, tail_amplitude=amplitude) * values

    def finalize(self, j: int, values: np.ndarray) -> None:
        n_values = self.nonlinearity_of(values)
        self.field.finalize(j, values)
        self.nonlinearity.finalize(j, n_values)
        self.accumulator.push(n_values)

        t = self.grid.t[j]
        r = self.grid.r
        weight = japanese(t + r) * japanese(t - r) ** (0.5 * (3.0 - self.gamma.value))
        running = self.x_norm_history[-1] if self.x_norm_history else 0.0
        self.x_norm_history.append(max(running, float(np.max(weight * np.abs(values)))))

    def blown_up(self, values: np.ndarray) -> bool:
        return not np.all(np.isfinite(values)) or float(np.max(np.abs(values))) > self.value_cap


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    scale = float(np.max(np.abs(new)))
    diff = float(np.max(np.abs(new - old)))
    if not math.isfinite(diff):
        return math.inf
    return diff / scale if scale > 0 else diff


def step_integral_equation(state: SolverState, slab_index: int) -> SlabOutcome:
    """Compute and (on success) finalize slab j of the integral equation.

    Predicts N on the slab by linear extrapolation, evaluates u = eps*u0 + L(N),
    then recomputes N from the predicted slab and corrects once. With full_picard
    the corrector repeats until the relative correction drops below tolerance.

    Args:
        state: Solver state with slabs 0..j-1 finalized.
        slab_index: Slab j to compute.

    Returns:
        SlabOutcome; diverged outcomes carry the per-iteration sup norms.
    """
    j = slab_index
    if j == 0:
        values = state.free[0].copy()
        history = [float(np.max(np.abs(values)))]
        if state.blown_up(values):
            return SlabOutcome(j, False, 0, 0.0, history, TerminationReason.NORM_THRESHOLD)
        state.finalize(0, values)
        return SlabOutcome(j, True, 0, 0.0, history)

    previous = state.nonlinearity.slab(j - 1)
    predicted_n = 2.0 * previous - state.nonlinearity.slab(j - 2) if j >= 2 else previous
    with np.errstate(over="ignore", invalid="ignore"):
        values = state.free[j] + state.accumulator.evaluate(j, predicted_n)
    history = [float(np.max(np.abs(values)))]
    if state.blown_up(values):
        return SlabOutcome(j, False, 0, math.inf, history, TerminationReason.NORM_THRESHOLD)

    limit = state.options.max_picard_iterations if state.options.full_picard else 1
    correction = math.inf
    iterations = 0
    while iterations < limit:
        with np.errstate(over="ignore", invalid="ignore"):
            corrected = state.free[j] + state.accumulator.evaluate(j, state.nonlinearity_of(values))
        iterations += 1
        history.append(float(np.max(np.abs(corrected))))
        if state.blown_up(corrected):
            return SlabOutcome(j, False, iterations, math.inf, history, TerminationReason.NORM_THRESHOLD)
        change = _relative_change(corrected, values)
        values = corrected

        if not state.options.full_picard:
            correction = change
            if correction > state.options.divergence_ratio:
                return SlabOutcome(j, False, iterations, correction, history, TerminationReason.PICARD_DIVERGENCE)
            break
        if change <= state.options.picard_tolerance:
            correction = change
            break
        if iterations > 1 and change >= correction:
            return SlabOutcome(j, False, iterations, change, history, TerminationReason.PICARD_DIVERGENCE)
        correction = change
    else:
        return SlabOutcome(j, False, iterations, correction, history, TerminationReason.PICARD_DIVERGENCE)

    state.finalize(j, values)
    logger.debug(f"slab {j}: iterations={iterations}, correction={correction:.3e}, sup={history[-1]:.4g}")
    return SlabOutcome(j, True, iterations, correction, history)


def march(
    state: SolverState, stepper: Callable[[SolverState, int], SlabOutcome] = step_integral_equation
) -> LifespanEstimate:
    """Advance slab by slab until divergence or the horizon."""
    grid = state.grid
    for j in range(grid.n_t):
        outcome = stepper(state, j)
        if not outcome.converged:
            assert outcome.reason is not None
            if j == 0:
                raise DomainError("initial slab exceeds value_cap; raise the cap above the data size")
            logger.info(
                f"eps={state.eps:.4g}: {outcome.reason.value} at slab {j} (t={grid.t[j]:.4g}), "
                f"norm history {[f'{v:.3g}' for v in outcome.norm_history]}"
            )
            return LifespanEstimate(
                eps=state.eps, T_low=grid.t[j - 1], T_high=grid.t[j], reason=outcome.reason, t_max=grid.t_max
            )
    logger.info(f"eps={state.eps:.4g}: horizon t_max={grid.t_max:.4g} reached")
    return LifespanEstimate(
        eps=state.eps,
        T_low=float(grid.t[-1]),
        T_high=grid.t_max,
        reason=TerminationReason.HORIZON_REACHED,
        t_max=grid.t_max,
    )


def solve(
    data: InitialDataSet,
    eps: float,
    gamma: "Gamma | float",
    grid: Grid,
    value_cap: float | None = None,
    options: SolverOptions | None = None,
) -> tuple[SpaceTimeField, LifespanEstimate]:
    """Solve the integral equation slab by slab.

    Args:
        data: Initial data on a mesh covering [0, r_max + t_max].
        eps: Data size.
        gamma: Potential exponent.
        grid: Characteristic grid.
        value_cap: Blow-up threshold; defaults to 1e6 * eps * (sup|u0| + sup|u1|).
        options: Solver options; value_cap overrides options.value_cap when given.

    Returns:
        The field (finalized up to the last converged slab) and the lifespan bracket.
    """
    state = _prepare(data, eps, gamma, grid, value_cap, options)
    estimate = march(state)
    return state.field, estimate


def solve_with_state(
    data: InitialDataSet,
    eps: float,
    gamma: "Gamma | float",
    grid: Grid,
    value_cap: float | None = None,
    options: SolverOptions | None = None,
) -> tuple[SolverState, LifespanEstimate]:
    """Like solve(), but return the full state (nonlinearity, X-norm history)."""
    state = _prepare(data, eps, gamma, grid, value_cap, options)
    return state, march(state)


def _prepare(
    data: InitialDataSet,
    eps: float,
    gamma: "Gamma | float",
    grid: Grid,
    value_cap: float | None,
    options: SolverOptions | None,
) -> SolverState:
    options = options or SolverOptions()
    if value_cap is not None:
        options = replace(options, value_cap=value_cap)
    return SolverState(data, eps, gamma, grid, options)

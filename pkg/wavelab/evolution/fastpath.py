"""Leapfrog solver for v = r*u on the characteristic grid.

v_tt - v_rr = r * N with v(0, t) = 0. With dt = dr the free part of the update is
exact on nodes, so the scheme differs from the integral solver only in how the
source is integrated.
"""

import logging
from dataclasses import replace

import numpy as np

from ..convolution.kernel import Gamma
from ..radial.families import InitialDataSet
from ..radial.grid import Grid
from ..radial.propagator import free_solution
from .field import LifespanEstimate, SpaceTimeField, TerminationReason
from .solver import SolverOptions, SolverState

logger = logging.getLogger(__name__)


def _from_v(v: np.ndarray, r: np.ndarray, h: float) -> np.ndarray:
    u = np.empty_like(v)
    u[1:] = v[1:] / r[1:]
    u[0] = (4.0 * v[1] - v[2]) / (2.0 * h)
    return u


def solve_fd_fastpath(
    data: InitialDataSet,
    eps: float,
    gamma: "Gamma | float",
    grid: Grid,
    value_cap: float | None = None,
    options: SolverOptions | None = None,
) -> tuple[SpaceTimeField, LifespanEstimate]:
    """Finite-difference counterpart of solve() with the same contract.

    Args:
        data: Initial data on a mesh covering [0, r_max + t_max].
        eps: Data size.
        gamma: Potential exponent.
        grid: Characteristic grid; needs at least two radial cells.
        value_cap: Blow-up threshold (same default as solve()).
        options: Only value_cap and nonlinear are used.

    Returns:
        Field and lifespan bracket.
    """
    options = options or SolverOptions()
    if value_cap is not None:
        options = replace(options, value_cap=value_cap)
    state = SolverState(data, eps, gamma, grid, options)
    h = grid.dr
    r = grid.r

    def stop(j: int, reason: TerminationReason) -> tuple[SpaceTimeField, LifespanEstimate]:
        logger.info(f"fd path eps={eps:.4g}: {reason.value} at t={grid.t[j]:.4g}")
        estimate = LifespanEstimate(eps=eps, T_low=grid.t[j - 1], T_high=grid.t[j], reason=reason, t_max=grid.t_max)
        return state.field, estimate

    u = state.free[0].copy()
    state.finalize(0, u)
    v_prev = r * u
    if grid.n_t == 1:
        return state.field, _horizon(eps, grid)

    n_prev = state.nonlinearity.slab(0)
    v = r * state.free[1] + 0.5 * h * h * r * n_prev
    boundary = grid.r_max * np.asarray(free_solution(data, eps, grid.r_max, grid.t[1:]))

    for j in range(1, grid.n_t):
        with np.errstate(over="ignore", invalid="ignore"):
            u = _from_v(v, r, h)
        if state.blown_up(u):
            return stop(j, TerminationReason.NORM_THRESHOLD)
        state.finalize(j, u)
        if j == grid.n_t - 1:
            break
        n_now = state.nonlinearity.slab(j)
        v_next = np.empty_like(v)
        with np.errstate(over="ignore", invalid="ignore"):
            v_next[1:-1] = v[2:] + v[:-2] - v_prev[1:-1] + h * h * r[1:-1] * n_now[1:-1]
        v_next[0] = 0.0
        v_next[-1] = boundary[j]
        v_prev, v = v, v_next

    logger.info(f"fd path eps={eps:.4g}: horizon t_max={grid.t_max:.4g} reached")
    return state.field, _horizon(eps, grid)


def _horizon(eps: float, grid: Grid) -> LifespanEstimate:
    return LifespanEstimate(
        eps=eps,
        T_low=float(grid.t[-1]),
        T_high=grid.t_max,
        reason=TerminationReason.HORIZON_REACHED,
        t_max=grid.t_max,
    )

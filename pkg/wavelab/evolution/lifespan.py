"""Lifespan estimates over a list of data sizes."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal

from ..convolution.kernel import Gamma, as_gamma
from ..errors import DomainError
from ..radial.families import DataFamily, build_on_grid
from ..radial.grid import Grid
from ..utils.logger import RunLogger
from .fastpath import solve_fd_fastpath
from .field import LifespanEstimate
from .solver import SolverOptions, solve

logger = logging.getLogger(__name__)

SolveMethod = Literal["integral", "fd"]


@dataclass(frozen=True)
class HorizonPolicy:
    """Grid choice per eps: t_max(eps) = min(t_cap, max(min_t_max, 4 exp(c_fit / eps^2)))."""

    dr: float
    t_cap: float
    c_fit: float
    support_radius: float = 0.0
    min_t_max: float = 1.0

    def __post_init__(self) -> None:
        if not self.dr > 0 or not self.t_cap > 0:
            raise DomainError("dr and t_cap must be positive")
        if self.c_fit < 0:
            raise DomainError(f"c_fit must be non-negative, got {self.c_fit}")

    def horizon(self, eps: float) -> float:
        if eps <= 0:
            return self.t_cap
        exponent = self.c_fit / (eps * eps)
        if exponent > math.log(self.t_cap / 4.0):
            return self.t_cap
        return min(self.t_cap, max(self.min_t_max, 4.0 * math.exp(exponent)))

    def grid_for(self, eps: float) -> Grid:
        return Grid.build(self.dr, self.horizon(eps), self.support_radius)


def _run_one(
    family: DataFamily,
    gamma: Gamma,
    eps: float,
    policy: HorizonPolicy,
    options: SolverOptions,
    method: SolveMethod,
) -> LifespanEstimate:
    run_logger = RunLogger(f"eps={eps:.3f}")
    grid = policy.grid_for(eps)
    run_logger.info(f"solving on dr={grid.dr}, t_max={grid.t_max}, r_max={grid.r_max} ({method})")
    data = build_on_grid(family, grid)
    solver = solve_fd_fastpath if method == "fd" else solve
    with run_logger.timed("solve"):
        _, estimate = solver(data, eps, gamma, grid, options=options)
    run_logger.info(f"T in [{estimate.T_low:.4g}, {estimate.T_high:.4g}) ({estimate.reason.value})")
    return estimate


def lifespan_estimate(
    family: DataFamily,
    gamma: "Gamma | float",
    eps_list: list[float],
    policy: HorizonPolicy,
    options: SolverOptions | None = None,
    workers: int = 1,
    method: SolveMethod = "integral",
) -> list[LifespanEstimate]:
    """Solve once per eps and collect lifespan brackets in eps order.

    Args:
        family: Data family instantiated on each run's grid.
        gamma: Potential exponent.
        eps_list: Non-empty, strictly decreasing data sizes.
        policy: Horizon policy; smaller eps gets a longer horizon.
        options: Solver options shared by all runs.
        workers: Size of the process pool; 1 runs serially.
        method: "integral" or "fd".

    Returns:
        One LifespanEstimate per eps, in the order given.

    Raises:
        DomainError: If eps_list is empty or not strictly decreasing.
    """
    if not eps_list:
        raise DomainError("eps_list must not be empty")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise DomainError(f"eps_list must be strictly decreasing, got {eps_list}")
    if any(eps < 0 for eps in eps_list):
        raise DomainError("eps values must be non-negative")
    g = as_gamma(gamma)
    options = options or SolverOptions()

    n = len(eps_list)
    args = ([family] * n, [g] * n, list(eps_list), [policy] * n, [options] * n, [method] * n)
    if workers > 1 and n > 1:
        logger.info(f"Dispatching {n} runs to {min(workers, n)} workers")
        with ProcessPoolExecutor(max_workers=min(workers, n)) as pool:
            return list(pool.map(_run_one, *args))
    return [_run_one(*call) for call in zip(*args)]

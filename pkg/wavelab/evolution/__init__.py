"""Duhamel operator, slab solvers and lifespan estimation."""

from .duhamel import DuhamelAccumulator, duhamel, duhamel_slab
from .fastpath import solve_fd_fastpath
from .field import LifespanEstimate, NonlinearityField, SpaceTimeField, TerminationReason
from .lifespan import HorizonPolicy, lifespan_estimate
from .solver import SlabOutcome, SolverOptions, SolverState, solve, solve_with_state, step_integral_equation

__all__ = [
    "DuhamelAccumulator",
    "HorizonPolicy",
    "LifespanEstimate",
    "NonlinearityField",
    "SlabOutcome",
    "SolverOptions",
    "SolverState",
    "SpaceTimeField",
    "TerminationReason",
    "duhamel",
    "duhamel_slab",
    "lifespan_estimate",
    "solve",
    "solve_fd_fastpath",
    "solve_with_state",
    "step_integral_equation",
]

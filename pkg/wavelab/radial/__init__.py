"""Grids, radial profiles, initial data and the free wave propagator."""

from .families import BlowupFamily, CompactBump, DataFamily, GaussianBump, InitialDataSet, build_on_grid, data_mesh
from .grid import Grid
from .profile import RadialProfile, TailSpec, japanese
from .propagator import dt_w_operator, free_solution, free_solution_grid, spherical_mean, w_operator

__all__ = [
    "BlowupFamily",
    "CompactBump",
    "DataFamily",
    "GaussianBump",
    "Grid",
    "InitialDataSet",
    "RadialProfile",
    "TailSpec",
    "build_on_grid",
    "data_mesh",
    "dt_w_operator",
    "free_solution",
    "free_solution_grid",
    "japanese",
    "spherical_mean",
    "w_operator",
]

"""Hartree potential evaluation: closed-form kernel reduction and Monte-Carlo oracle."""

from .kernel import Gamma, KernelClosedForm, Regime, as_gamma, kernel_integral
from .monte_carlo import MonteCarloEstimate, OracleCase, draw_oracle_cases, hartree_potential_mc
from .potential import ConvolutionOperator, hartree_potential, refine_mesh, tail_integrals

__all__ = [
    "ConvolutionOperator",
    "Gamma",
    "KernelClosedForm",
    "MonteCarloEstimate",
    "OracleCase",
    "Regime",
    "as_gamma",
    "draw_oracle_cases",
    "hartree_potential",
    "hartree_potential_mc",
    "kernel_integral",
    "refine_mesh",
    "tail_integrals",
]

"""Blow-up iteration ladder, lower-bound envelopes and the predicted upper lifespan (gamma = 2)."""

from .envelopes import (
    EnvelopeReport,
    envelope_vs_numeric,
    first_estimate,
    first_estimate_violations,
    lower_envelope,
    potential_lower,
    potential_vs_numeric,
)
from .ladder import BlowupConstants, IterationSequence, corrupt, recursion_residuals, sequences, verify_recursion
from .lifespan import (
    PredictedLifespan,
    divergence_function,
    eps0_threshold,
    gamma_line_lower_bound,
    predicted_upper_lifespan,
    theoretical_slope,
)

__all__ = [
    "BlowupConstants",
    "EnvelopeReport",
    "IterationSequence",
    "PredictedLifespan",
    "corrupt",
    "divergence_function",
    "envelope_vs_numeric",
    "eps0_threshold",
    "first_estimate",
    "first_estimate_violations",
    "gamma_line_lower_bound",
    "lower_envelope",
    "potential_lower",
    "potential_vs_numeric",
    "predicted_upper_lifespan",
    "recursion_residuals",
    "sequences",
    "theoretical_slope",
    "verify_recursion",
]

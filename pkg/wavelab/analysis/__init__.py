"""Weighted norms and empirical verification of the decay estimates."""

from .bounds import (
    BoundReport,
    duhamel_of_product,
    exact_weight_field,
    log_loss_factor,
    verify_duhamel_bound,
    verify_potential_bound,
)
from .lemmas import IntervalEstimate, integral_closed_form, integral_lhs, lemma_integral_oracle, rhs_shape
from .norms import homogeneous_y_norm, x_norm, x_norm_history, y_norm
from .samples import SampleRegime, SampleSet
from .scaling import ScalingReport, scaling_check
from .weights import WeightSpec

__all__ = [
    "BoundReport",
    "IntervalEstimate",
    "SampleRegime",
    "SampleSet",
    "ScalingReport",
    "WeightSpec",
    "duhamel_of_product",
    "exact_weight_field",
    "homogeneous_y_norm",
    "integral_closed_form",
    "integral_lhs",
    "lemma_integral_oracle",
    "log_loss_factor",
    "rhs_shape",
    "scaling_check",
    "verify_duhamel_bound",
    "verify_potential_bound",
    "x_norm",
    "x_norm_history",
    "y_norm",
]

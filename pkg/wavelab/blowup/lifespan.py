"""Predicted upper lifespan and the divergence function K(t) along r = t/2."""

import math
from dataclasses import dataclass
from typing import Any

from ..errors import DomainError
from .ladder import BlowupConstants

LOG_4 = math.log(4.0)
# exp overflows double precision above this argument
EXP_LIMIT = 709.0


def _safe_exp(value: float) -> float:
    return math.exp(value) if value < EXP_LIMIT else math.inf


@dataclass(frozen=True)
class PredictedLifespan:
    """Upper lifespan bound exp(2 F^(-2/3) eps^(-2)) and the root t_K of K, kept as logs."""

    eps: float
    B: float
    log_T: float
    log_t_K: float

    @property
    def T(self) -> float:
        return _safe_exp(self.log_T)

    @property
    def t_K(self) -> float:
        return _safe_exp(self.log_t_K)

    @property
    def slope(self) -> float:
        """d log T / d eps^(-2) = 2 F^(-2/3)."""
        return self.log_T * self.eps**2

    def to_dict(self) -> dict[str, Any]:
        return {
            "eps": self.eps,
            "B": self.B,
            "log_T": self.log_T,
            "log_t_K": self.log_t_K,
            "T": self.T if math.isfinite(self.T) else None,
            "t_K": self.t_K if math.isfinite(self.t_K) else None,
        }


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")


def theoretical_slope(B: float) -> float:
    """2 F^(-2/3), the coefficient of eps^(-2) in the log of the upper bound."""
    return 2.0 * math.exp(-2.0 / 3.0 * BlowupConstants(B).log_F)


def predicted_upper_lifespan(eps: float, B: float) -> PredictedLifespan:
    """Upper lifespan bound for blow-up data of amplitude B at size eps.

    Raises:
        DomainError: If eps <= 0.
    """
    _check_eps(eps)
    log_f = BlowupConstants(B).log_F
    log_T = theoretical_slope(B) / eps**2
    log_t_K = LOG_4 + math.exp(-2.0 / 3.0 * (3.0 * math.log(eps) + log_f))
    return PredictedLifespan(eps=eps, B=B, log_T=log_T, log_t_K=log_t_K)


def divergence_function(eps: float, B: float, t: float) -> float:
    """K(t) = log(eps^3 F log(t/4)^(3/2)) for t > 4."""
    _check_eps(eps)
    if not t > 4.0:
        raise DomainError(f"K(t) needs t > 4, got {t}")
    return 3.0 * math.log(eps) + BlowupConstants(B).log_F + 1.5 * math.log(math.log(t / 4.0))


def gamma_line_lower_bound(j: int, eps: float, B: float, t: float) -> float:
    """log of the lower bound for u(t/2, t) implied by the j-th envelope.

    2^(3/2) 3^(-1) E^(-1/2) exp(3^(j-1) K(t)) t^(-3/2) log(t/4)^(-1/2); it grows without
    bound in j once K(t) > 0.
    """
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    k = divergence_function(eps, B, t)
    constants = BlowupConstants(B)
    return (
        1.5 * math.log(2.0)
        - math.log(3.0)
        - 0.5 * math.log(constants.E)
        + float(3 ** (j - 1)) * k
        - 1.5 * math.log(t)
        - 0.5 * math.log(math.log(t / 4.0))
    )


def eps0_threshold(B: float) -> float:
    """Largest eps0 with exp(F^(-2/3) eps0^(-2)) >= 4."""
    return math.sqrt(math.exp(-2.0 / 3.0 * BlowupConstants(B).log_F) / LOG_4)

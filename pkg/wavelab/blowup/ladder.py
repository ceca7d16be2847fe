"""The iteration ladder of lower-bound constants, kept in log space.

C_1 = C_0^3 pi eps^3 / (2 * 3^5),  C_0 = B / 2^(5/2)
log C_j = 3^(j-1) (log C_1 - S_j log 24 + (1/2) log E) - (1/2) log E
a_j = (3^j - 1)/2,  l_j = 2 - 2^(-j),  S_j = sum_{k<j} k/3^k,  E = pi / 1728
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..errors import DomainError

LOG_24 = math.log(24.0)
E_CONSTANT = math.pi / 1728.0
S_LIMIT = Fraction(3, 4)
# Log-space recursion residuals are measured relative to max(1, |log C_{j+1}|)
RECURSION_TOLERANCE = 1e-10


def s_partial(j: int) -> Fraction:
    """S_j = sum_{k=1}^{j-1} k/3^k = 3/4 - 3(2j+1)/(4*3^j), exactly."""
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    return S_LIMIT - Fraction(3 * (2 * j + 1), 4 * 3**j)


def l_level(j: int) -> Fraction:
    """l_j = sum_{k=0}^{j} 2^-k = 2 - 2^-j."""
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    return 2 - Fraction(1, 2**j)


def a_exponent(j: int) -> int:
    """a_j = (3^j - 1)/2."""
    return (3**j - 1) // 2


@dataclass(frozen=True)
class BlowupConstants:
    """Constants fixed by the data amplitude B."""

    B: float

    def __post_init__(self) -> None:
        if not self.B > 0:
            raise DomainError(f"B must be positive, got {self.B}")

    @property
    def C0(self) -> float:
        return self.B / 2.0**2.5

    @property
    def E(self) -> float:
        return E_CONSTANT

    @property
    def S(self) -> float:
        return float(S_LIMIT)

    @property
    def log_F(self) -> float:
        """log F, F = C_0^3 pi / (2 * 3^5) * 24^(-S) * E^(1/2)."""
        return 3.0 * math.log(self.C0) + math.log(math.pi) - math.log(486.0) - self.S * LOG_24 + 0.5 * math.log(self.E)

    @property
    def F(self) -> float:
        return math.exp(self.log_F)

    def log_C1(self, eps: float) -> float:
        if not eps > 0:
            raise DomainError(f"eps must be positive, got {eps}")
        return 3.0 * math.log(self.C0) + math.log(math.pi) + 3.0 * math.log(eps) - math.log(486.0)


@dataclass(frozen=True)
class IterationSequence:
    """One rung j of the ladder."""

    j: int
    log_C: float
    a: int
    l: Fraction
    S: Fraction

    @property
    def C(self) -> float:
        """C_j itself; 0.0 once it underflows."""
        return math.exp(self.log_C) if self.log_C > -745.0 else 0.0

    def to_row(self) -> dict[str, Any]:
        return {"j": self.j, "log_C_j": self.log_C, "a_j": self.a, "l_j": float(self.l), "S_j": float(self.S)}


def log_C(j: int, eps: float, B: float) -> float:
    """log C_j from the closed form."""
    constants = BlowupConstants(B)
    half_log_e = 0.5 * math.log(constants.E)
    bracket = constants.log_C1(eps) - float(s_partial(j)) * LOG_24 + half_log_e
    return float(3 ** (j - 1)) * bracket - half_log_e


def sequences(j_max: int, eps: float, B: float) -> list[IterationSequence]:
    """Rungs 1..j_max of the ladder.

    Args:
        j_max: Highest rung, >= 1.
        eps: Data size, > 0.
        B: Data amplitude, > 0.

    Returns:
        List of IterationSequence ordered by j.
    """
    if j_max < 1:
        raise DomainError(f"j_max must be >= 1, got {j_max}")
    out = [IterationSequence(1, BlowupConstants(B).log_C1(eps), a_exponent(1), l_level(1), s_partial(1))]
    for j in range(2, j_max + 1):
        out.append(IterationSequence(j, log_C(j, eps, B), a_exponent(j), l_level(j), s_partial(j)))
    return out


def recursion_residuals(seq: list[IterationSequence]) -> list[float]:
    """Relative residuals of log C_{j+1} = 3 log C_j + log E - j log 24 for consecutive rungs."""
    log_e = math.log(E_CONSTANT)
    out = []
    for current, following in zip(seq, seq[1:]):
        predicted = 3.0 * current.log_C + log_e - current.j * LOG_24
        out.append(abs(following.log_C - predicted) / max(1.0, abs(following.log_C)))
    return out


def verify_recursion(seq: list[IterationSequence], tolerance: float = RECURSION_TOLERANCE) -> bool:
    """Check the C_j recursion and a_{j+1} = 3 a_j + 1 on every consecutive pair."""
    for current, following in zip(seq, seq[1:]):
        if following.j != current.j + 1 or following.a != 3 * current.a + 1:
            return False
    return all(residual <= tolerance for residual in recursion_residuals(seq))


def corrupt(seq: list[IterationSequence], j: int, factor: float) -> list[IterationSequence]:
    """Copy of the ladder with C_j multiplied by factor."""
    return [
        IterationSequence(s.j, s.log_C + math.log(factor), s.a, s.l, s.S) if s.j == j else s for s in seq
    ]

"""Closed-form stability condition on contact backgrounds.

With lhs = [F11]/F11+ the condition reads

    d = 2:  lhs < F22^2 / F11+^2
    d = 3:  lhs < 1/C,  C = (1 + F22^2/F33^2)^{1/2}
                            (max(1, F11+^2/F22^2) + max(1, F11+^2/F33^2) F33/F22)

The tangential energy estimate uses the constants

    C0 = max(1, F11+^2/F22^2) lhs                                          (d = 2)
    C1 = (1 + F33^2/F22^2)^{1/2} max(1, F22^2/F11+^2) X,   X = F11+ [F11]/(F22 F33)
    C2 = (1 + F33^2/F22^2)^{1/2} max(1, F33^2/F11+^2) X
    C3 = (1 + F22^2/F33^2)^{1/2} max(1, F33^2/F11+^2) X
    C4 = (1 + F22^2/F33^2)^{1/2} max(1, F22^2/F11+^2) X

and for d = 3 the alternative criterion C2 C4 < (1 - C1)(1 - C3) with C1, C3 < 1
is equivalent because C1 C3 = C2 C4. The condition is sufficient for the
estimates; a failed condition only means "not satisfied".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, NamedTuple, Optional, Union

from app.core.errors import ConfigurationError
from app.services.interface.background import BackgroundState

logger = logging.getLogger(__name__)

BOUNDARY_RTOL = 1e-14

SATISFIED = "satisfied"
NOT_SATISFIED = "not-satisfied"

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class Stretches:
    """Background stretches entering the condition.

    Attributes:
        dim: Space dimension
        f11_plus: F11+
        f11_minus: F11-
        f22: F22 (shared by both sides)
        f33: F33 (d = 3 only)
    """
    dim: int
    f11_plus: float
    f11_minus: float
    f22: float
    f33: Optional[float] = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"dim must be 2 or 3, got {self.dim}")
        if self.dim == 3 and self.f33 is None:
            raise ConfigurationError("d = 3 needs F33")
        values = [self.f11_plus, self.f11_minus, self.f22] + ([self.f33] if self.dim == 3 else [])
        if any(not v > 0 for v in values):
            raise ConfigurationError(f"stretches must be > 0, got {values}")
        if self.f11_minus > self.f11_plus:
            raise ConfigurationError(f"need F11- <= F11+, got {self.f11_minus} > {self.f11_plus}")

    @classmethod
    def from_background(cls, bg: BackgroundState) -> "Stretches":
        s = [float(x) for x in bg.stretches_plus]
        return cls(bg.dim, s[0], bg.f11_minus, s[1], s[2] if bg.dim == 3 else None)

    @property
    def jump(self) -> float:
        return self.f11_plus - self.f11_minus

    @property
    def lhs(self) -> float:
        return self.jump / self.f11_plus


@dataclass
class StabilityVerdict:
    """Outcome of the condition for one background.

    Attributes:
        dim: Space dimension
        lhs: [F11]/F11+
        rhs: F22^2/F11+^2 (d = 2) or 1/C (d = 3)
        margin: rhs - lhs
        satisfied: lhs < rhs strictly
        on_boundary: margin is zero up to round-off
        constants: C0 (d = 2) or C, C1..C4 (d = 3)
        alternative: C1 < 1, C3 < 1 and C2 C4 < (1 - C1)(1 - C3) (d = 3)
    """
    dim: int
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    on_boundary: bool
    constants: Dict[str, float]
    alternative: Optional[bool] = None

    @property
    def status(self) -> str:
        return SATISFIED if self.satisfied else NOT_SATISFIED

    @property
    def criteria_agree(self) -> bool:
        return self.alternative is None or self.alternative == self.satisfied

    def to_dict(self) -> Dict:
        out = {
            "dim": self.dim,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "status": self.status,
            "on_boundary": self.on_boundary,
        }
        out.update(self.constants)
        if self.alternative is not None:
            out["alternative"] = self.alternative
            out["criteria_agree"] = self.criteria_agree
        return out


def estimate_constants(st: Stretches) -> Dict[str, float]:
    """C0 for d = 2; C and C1..C4 for d = 3."""
    f11, f22 = st.f11_plus, st.f22
    if st.dim == 2:
        return {"C0": max(1.0, f11 ** 2 / f22 ** 2) * st.lhs}
    f33 = st.f33
    root_23 = math.sqrt(1.0 + f33 ** 2 / f22 ** 2)
    root_32 = math.sqrt(1.0 + f22 ** 2 / f33 ** 2)
    x = f11 * st.jump / (f22 * f33)
    m22 = max(1.0, f22 ** 2 / f11 ** 2)
    m33 = max(1.0, f33 ** 2 / f11 ** 2)
    C = root_32 * (max(1.0, f11 ** 2 / f22 ** 2) + max(1.0, f11 ** 2 / f33 ** 2) * f33 / f22)
    return {
        "C": C,
        "C1": root_23 * m22 * x,
        "C2": root_23 * m33 * x,
        "C3": root_32 * m33 * x,
        "C4": root_32 * m22 * x,
    }


def evaluate_stretches(st: Stretches) -> StabilityVerdict:
    """Evaluate the condition, the constants and (d = 3) the alternative criterion.

    Example:
        >>> v = evaluate_stretches(Stretches(2, 1.0, 0.5, 1.0))
        >>> v.status, v.margin, v.constants["C0"]
        ('satisfied', 0.5, 0.5)
    """
    constants = estimate_constants(st)
    lhs = st.lhs
    if st.dim == 2:
        rhs = st.f22 ** 2 / st.f11_plus ** 2
    else:
        rhs = 1.0 / constants["C"]
    margin = rhs - lhs
    on_boundary = abs(margin) <= BOUNDARY_RTOL * max(1.0, abs(rhs))
    satisfied = margin > 0.0 and not on_boundary

    alternative = None
    if st.dim == 3:
        c1, c2, c3, c4 = (constants[k] for k in ("C1", "C2", "C3", "C4"))
        alternative = c1 < 1.0 and c3 < 1.0 and c2 * c4 < (1.0 - c1) * (1.0 - c3)
        if alternative != satisfied and not on_boundary:
            logger.warning(f"Criteria disagree away from equality: margin {margin:.3e}")
    return StabilityVerdict(st.dim, lhs, rhs, margin, satisfied, on_boundary, constants, alternative)


def evaluate_condition(bg: BackgroundState) -> StabilityVerdict:
    """Stability verdict of a background.

    Args:
        bg: Contact background

    Returns:
        StabilityVerdict
    """
    verdict = evaluate_stretches(Stretches.from_background(bg))
    logger.info(f"Stability condition {verdict.status}: lhs={verdict.lhs:.6g}, rhs={verdict.rhs:.6g}")
    return verdict


# ---------------------------------------------------------------------------
# Exact arithmetic
# ---------------------------------------------------------------------------

class Surd(NamedTuple):
    """coefficient * sqrt(radicand) with rational parts."""
    coefficient: Fraction
    radicand: Fraction

    def __mul__(self, other: "Surd") -> "Surd":
        return Surd(self.coefficient * other.coefficient, self.radicand * other.radicand)

    def __float__(self) -> float:
        return float(self.coefficient) * math.sqrt(float(self.radicand))


def _fractions(*values: Number):
    return tuple(Fraction(v) for v in values)


def exact_constants(f11_plus: Number, f11_minus: Number, f22: Number, f33: Number) -> Dict[str, Surd]:
    """C1..C4 for d = 3 in exact arithmetic, each as a rational multiple of a square root."""
    f11, f11m, f22, f33 = _fractions(f11_plus, f11_minus, f22, f33)
    x = f11 * (f11 - f11m) / (f22 * f33)
    m22 = max(Fraction(1), f22 ** 2 / f11 ** 2)
    m33 = max(Fraction(1), f33 ** 2 / f11 ** 2)
    r23 = 1 + f33 ** 2 / f22 ** 2
    r32 = 1 + f22 ** 2 / f33 ** 2
    return {
        "C1": Surd(m22 * x, r23),
        "C2": Surd(m33 * x, r23),
        "C3": Surd(m33 * x, r32),
        "C4": Surd(m22 * x, r32),
    }


def exact_product_identity(f11_plus: Number, f11_minus: Number, f22: Number, f33: Number) -> bool:
    """C1 C3 == C2 C4 compared exactly (rational parts and radicands)."""
    c = exact_constants(f11_plus, f11_minus, f22, f33)
    return c["C1"] * c["C3"] == c["C2"] * c["C4"]


def exact_satisfied(dim: int, f11_plus: Number, f11_minus: Number, f22: Number,
                    f33: Optional[Number] = None) -> bool:
    """Condition decided in rational arithmetic.

    For d = 3, lhs < 1/C is squared into lhs^2 (1 + F22^2/F33^2) R^2 < 1 with
    R the rational bracket of C.
    """
    f11, f11m, f22 = _fractions(f11_plus, f11_minus, f22)
    lhs = (f11 - f11m) / f11
    if dim == 2:
        return lhs < f22 ** 2 / f11 ** 2
    f33 = Fraction(f33)
    bracket = max(Fraction(1), f11 ** 2 / f22 ** 2) + max(Fraction(1), f11 ** 2 / f33 ** 2) * f33 / f22
    return lhs ** 2 * (1 + f22 ** 2 / f33 ** 2) * bracket ** 2 < 1


def exact_rearranged_2d(f11_plus: Number, f11_minus: Number, f22: Number) -> bool:
    """lhs F11+^2 < F22^2, the d = 2 condition without division."""
    f11, f11m, f22 = _fractions(f11_plus, f11_minus, f22)
    return (f11 - f11m) / f11 * f11 ** 2 < f22 ** 2

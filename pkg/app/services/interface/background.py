"""Piecewise-constant contact-discontinuity backgrounds.

At rest (v = 0, phi = 0) with diagonal deformation gradients sharing the
tangential stretches, the only nontrivial jump condition left is

    rho+ F11+ [F11] = [p]

so the left pressure is fixed by the right state and the left stretch, and
the left entropy follows by inverting the EOS at the left density.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from app.core.errors import ConfigurationError, NegativeTargetPressure
from app.models.front import FrontGeometry
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState
from app.services.interface.jump import JumpState

logger = logging.getLogger(__name__)


@dataclass
class BackgroundState:
    """Constant states U+- separated by the flat front phi = 0.

    Attributes:
        params: Material parameters
        stretches_plus: Diagonal of F+ (F11+, F22, ..., Fdd)
        f11_minus: F11-
        s_plus: Entropy S+
        s_minus: Entropy S- solving the jump relation
    """
    params: MaterialParams
    stretches_plus: np.ndarray
    f11_minus: float
    s_plus: float
    s_minus: float

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def f11_plus(self) -> float:
        return float(self.stretches_plus[0])

    @property
    def jump_f11(self) -> float:
        return self.f11_plus - self.f11_minus

    def F(self, sign: int) -> np.ndarray:
        stretches = np.array(self.stretches_plus, dtype=float)
        if sign < 0:
            stretches[0] = self.f11_minus
        return np.diag(stretches)

    def rho(self, sign: int) -> float:
        return 1.0 / float(np.prod(np.diag(self.F(sign))))

    def entropy(self, sign: int) -> float:
        return self.s_plus if sign > 0 else self.s_minus

    def state(self, sign: int) -> ThermoState:
        return ThermoState.at_rest(self.F(sign), self.params, self.entropy(sign))

    def pressure(self, sign: int) -> float:
        return self.state(sign).pressure

    def sound_speed_sq(self, sign: int) -> float:
        return self.state(sign).sound_speed_sq(self.params)

    def vector(self, sign: int) -> np.ndarray:
        return self.state(sign).to_vector()

    def traces(self) -> JumpState:
        """Traces on the flat, static front."""
        return JumpState(self.state(-1), self.state(+1), FrontGeometry.flat(self.dim))

    def jump_relation_residual(self) -> float:
        """|rho+ F11+ [F11] - [p]|."""
        lhs = self.rho(+1) * self.f11_plus * self.jump_f11
        return abs(lhs - (self.pressure(+1) - self.pressure(-1)))

    def to_dict(self) -> Dict:
        out = {"dim": self.dim, "gamma": self.params.gamma, "eos": self.params.eos_kind.value}
        for sign, tag in ((+1, "plus"), (-1, "minus")):
            out[tag] = {
                "F_diag": np.diag(self.F(sign)).tolist(),
                "rho": self.rho(sign),
                "p": self.pressure(sign),
                "c2": self.sound_speed_sq(sign),
                "S": self.entropy(sign),
            }
        out["jump_F11"] = self.jump_f11
        out["jump_relation_residual"] = self.jump_relation_residual()
        return out


def build_background(
    stretches_plus: Sequence[float],
    f11_minus: float,
    s_plus: float,
    params: MaterialParams,
) -> BackgroundState:
    """Construct the background determined by F+, F11- and S+.

    Args:
        stretches_plus: Diagonal of F+ (length d)
        f11_minus: Normal stretch on the minus side, 0 < F11- <= F11+
        s_plus: Entropy on the plus side
        params: Material parameters

    Returns:
        BackgroundState satisfying the jump relation

    Raises:
        ConfigurationError: If stretches are not positive or F11- > F11+,
            or the elastic coefficients are not all 1
        NegativeTargetPressure: If p- = p+ - rho+ F11+ [F11] is not admissible

    Example:
        >>> bg = build_background([1.0, 1.0], 0.5, 0.0, MaterialParams(dim=2, gamma=1.4))
        >>> round(bg.s_minus, 5)
        -1.66355
    """
    if not params.is_unit_elastic:
        raise ConfigurationError(f"contact backgrounds use a_j = 1, got elastic={params.elastic}")
    stretches = np.asarray(stretches_plus, dtype=float)
    if stretches.shape != (params.dim,):
        raise ConfigurationError(f"need {params.dim} stretches, got {stretches.shape}")
    if np.any(stretches <= 0.0) or f11_minus <= 0.0:
        raise ConfigurationError(f"stretches must be > 0: {stretches.tolist()}, F11-={f11_minus}")
    if f11_minus > stretches[0]:
        raise ConfigurationError(f"need F11- <= F11+, got {f11_minus} > {stretches[0]}")

    eos = params.eos()
    rho_plus = 1.0 / float(np.prod(stretches))
    p_plus = float(eos.pressure(rho_plus, s_plus))
    p_minus = p_plus - rho_plus * stretches[0] * (stretches[0] - f11_minus)
    if p_minus <= -eos.p_inf or p_minus <= 0.0:
        raise NegativeTargetPressure(
            f"left pressure p- = {p_minus:.6g} is not admissible for F11- = {f11_minus}"
        )
    rho_minus = 1.0 / (f11_minus * float(np.prod(stretches[1:])))
    s_minus = float(eos.entropy_from_pressure(rho_minus, p_minus))
    bg = BackgroundState(params, stretches, float(f11_minus), float(s_plus), s_minus)
    logger.info(
        f"Background built: [F11]={bg.jump_f11:.6g}, p+={p_plus:.6g}, p-={p_minus:.6g}, S-={s_minus:.6g}"
    )
    return bg

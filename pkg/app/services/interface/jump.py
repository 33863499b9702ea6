"""Jump conditions across the front and the nonlinear boundary operator.

For traces U+- on x_1 = phi the mass flux is m_N = rho (v_N - d_t phi) and
[g] = g+ - g-. The Rankine-Hugoniot system stacked by :func:`rh_residual`
(elastic coefficients a_k enter through the Cauchy stress):

    [m_N]
    [m_N v] - [rho sum_k a_k F_kN F_k] + N [p]
    [m_N (|v|^2/2 + eps)] - [rho sum_k a_k F_kN (F_k . v)] + [p v_N]
    [m_N F_ij] - [rho F_jN v_i]
    [rho F_jN]
    [rho F_kN F_ij - rho F_jN F_ik]        (j < k)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Tuple

import numpy as np

from app.core.errors import ConstraintViolated, SingularMinor
from app.models.front import FrontGeometry
from app.models.layout import UnknownLayout
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState, internal_energy

logger = logging.getLogger(__name__)

SINGULAR_MINOR_TOL = 1e-12
CONSTRAINT_TOL = 1e-10


class BoundaryForm(Enum):
    """Which third row the boundary operator uses."""
    GENERAL = "general"
    VARRHO = "varrho"


@dataclass
class JumpState:
    """Left/right traces on the front.

    Attributes:
        minus: Trace U- (side x_1 < phi)
        plus: Trace U+ (side x_1 > phi)
        front: Front geometry at the point
    """
    minus: ThermoState
    plus: ThermoState
    front: FrontGeometry

    @property
    def dim(self) -> int:
        return self.plus.dim

    def side(self, sign: int) -> ThermoState:
        return self.plus if sign > 0 else self.minus

    def normal_velocity(self, sign: int) -> float:
        return float(self.front.normal_component(self.side(sign).velocity))

    def mass_flux(self, sign: int) -> float:
        state = self.side(sign)
        return state.density * (self.normal_velocity(sign) - float(self.front.dt_phi))

    def F_N(self, sign: int) -> np.ndarray:
        """F_jN for j = 1..d on one side."""
        return self.front.F_N(self.side(sign).F)

    def jump(self, quantity: Callable[[int], np.ndarray]) -> np.ndarray:
        """[g] = g(+) - g(-) for a side-indexed quantity."""
        return np.asarray(quantity(+1)) - np.asarray(quantity(-1))


def rh_residual_names(dim: int) -> List[str]:
    names = ["mass"]
    names += [f"momentum_{a + 1}" for a in range(dim)]
    names += ["energy"]
    names += [f"deformation_{i + 1}{j + 1}" for j in range(dim) for i in range(dim)]
    names += [f"rhoFN_{j + 1}" for j in range(dim)]
    names += [
        f"involution_{i + 1}_{j + 1}{k + 1}"
        for j in range(dim) for k in range(j + 1, dim) for i in range(dim)
    ]
    return names


def rh_residual(js: JumpState, params: MaterialParams) -> np.ndarray:
    """Stacked residual of the full Rankine-Hugoniot system.

    Zero iff the traces form a weak-solution interface.

    Raises:
        NonOrientationPreserving: If det F+- <= 0
    """
    d = js.dim
    N = js.front.normal
    a = np.asarray(params.elastic)

    def momentum(s: int) -> np.ndarray:
        st = js.side(s)
        FN = js.F_N(s)
        elastic = st.density * (st.F * (a * FN)).sum(axis=1)
        return js.mass_flux(s) * st.velocity - elastic + N * st.pressure

    def energy(s: int) -> float:
        st = js.side(s)
        FN = js.F_N(s)
        eps = float(internal_energy(st.F, st.entropy, params))
        total = 0.5 * float(st.velocity @ st.velocity) + eps
        work = st.density * float(np.sum(a * FN * (st.F.T @ st.velocity)))
        return js.mass_flux(s) * total - work + st.pressure * js.normal_velocity(s)

    def deformation(s: int) -> np.ndarray:
        st = js.side(s)
        FN = js.F_N(s)
        out = js.mass_flux(s) * st.F - st.density * np.outer(st.velocity, FN)
        return out.reshape(-1, order="F")

    def rho_FN(s: int) -> np.ndarray:
        return js.side(s).density * js.F_N(s)

    def involution(s: int) -> np.ndarray:
        st = js.side(s)
        FN = js.F_N(s)
        rows = []
        for j in range(d):
            for k in range(j + 1, d):
                rows.append(st.density * (FN[k] * st.F[:, j] - FN[j] * st.F[:, k]))
        return np.concatenate(rows) if rows else np.zeros(0)

    parts = [
        np.atleast_1d(js.jump(js.mass_flux)),
        js.jump(momentum),
        np.atleast_1d(js.jump(energy)),
        js.jump(deformation),
        js.jump(rho_FN),
        js.jump(involution),
    ]
    return np.concatenate(parts)


def varrho_eval(F: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return varrho(F) and its gradient with respect to F.

    varrho = 1/F_22 (d=2) or 1/(F_22 F_33 - F_23 F_32) (d=3); the gradient is
    -varrho F'^{-T} on the tangential block and zero elsewhere. Accepts a
    single matrix or a stack (..., d, d).

    Raises:
        SingularMinor: If the tangential minor is below 1e-12 in magnitude

    Example:
        >>> value, grad = varrho_eval(np.diag([1.0, 2.0]))
        >>> float(value), float(grad[1, 1])
        (0.5, -0.25)
    """
    F = np.asarray(F, dtype=float)
    d = F.shape[-1]
    minor = F[..., 1:, 1:]
    det = np.linalg.det(minor) if d > 2 else minor[..., 0, 0]
    if np.any(np.abs(det) < SINGULAR_MINOR_TOL):
        raise SingularMinor(f"tangential minor {np.min(np.abs(det)):.3e} below {SINGULAR_MINOR_TOL}")
    value = 1.0 / np.asarray(det)
    grad = np.zeros_like(F)
    inv_T = np.swapaxes(np.linalg.inv(minor), -1, -2)
    grad[..., 1:, 1:] = -value[..., None, None] * inv_T
    return value, grad


def boundary_operator(js: JumpState, params: MaterialParams,
                      form: BoundaryForm = BoundaryForm.VARRHO,
                      tol: float = CONSTRAINT_TOL) -> np.ndarray:
    """Nonlinear boundary operator, a vector of length 2d+1.

    Rows: d_t phi - v_N+, [v], [p] - w [F_11] with w = rho+ F_1N+ (general) or
    varrho(F+) (varrho form), and [F_11 d_i phi + F_i1] for i = 2..d.

    Raises:
        ConstraintViolated: If the varrho form is requested while F_jN+- (j >= 2)
            exceeds ``tol``
    """
    d = js.dim
    grad_phi = js.front.grad_phi
    if form is BoundaryForm.VARRHO:
        tangential = np.concatenate([js.F_N(+1)[1:], js.F_N(-1)[1:]])
        if tangential.size and np.max(np.abs(tangential)) > tol:
            raise ConstraintViolated(
                f"varrho form needs F_jN = 0 (j >= 2); max |F_jN| = {np.max(np.abs(tangential)):.3e}"
            )
        weight = float(varrho_eval(js.plus.F)[0])
    else:
        weight = js.plus.density * float(js.F_N(+1)[0])

    out = np.empty(2 * d + 1)
    out[0] = float(js.front.dt_phi) - js.normal_velocity(+1)
    out[1:d + 1] = js.plus.velocity - js.minus.velocity
    jump_F11 = js.plus.F[0, 0] - js.minus.F[0, 0]
    out[d + 1] = (js.plus.pressure - js.minus.pressure) - weight * jump_F11
    for i in range(1, d):
        plus = js.plus.F[0, 0] * grad_phi[i - 1] + js.plus.F[i, 0]
        minus = js.minus.F[0, 0] * grad_phi[i - 1] + js.minus.F[i, 0]
        out[d + 1 + i] = plus - minus
    return out


def boundary_operator_field(
    U_minus: np.ndarray,
    U_plus: np.ndarray,
    grad_phi: np.ndarray,
    dt_phi: np.ndarray,
    params: MaterialParams,
) -> np.ndarray:
    """Varrho form of the boundary operator on whole boundary arrays.

    Same rows as :func:`boundary_operator`, evaluated pointwise on
    component-first traces (n, *boundary_shape) without the F_jN = 0 check,
    so it can be differentiated along families leaving the constraint manifold.

    Args:
        U_minus: Trace of U- on x_1 = 0
        U_plus: Trace of U+
        grad_phi: (d_2 phi, ..., d_d phi), shape (d-1, *boundary_shape)
        dt_phi: d_t phi on the boundary
        params: Material parameters

    Returns:
        Array (2d+1, *boundary_shape)
    """
    layout = UnknownLayout(params.dim)
    d = params.dim
    p_m, v_m, F_m, _ = layout.split(U_minus)
    p_p, v_p, F_p, _ = layout.split(U_plus)
    weight, _ = varrho_eval(np.moveaxis(F_p, (0, 1), (-2, -1)))
    out = np.empty((2 * d + 1,) + p_p.shape)
    v_N = v_p[0] - sum(grad_phi[j - 1] * v_p[j] for j in range(1, d))
    out[0] = dt_phi - v_N
    out[1:d + 1] = v_p - v_m
    out[d + 1] = (p_p - p_m) - weight * (F_p[0, 0] - F_m[0, 0])
    for i in range(1, d):
        plus = F_p[0, 0] * grad_phi[i - 1] + F_p[i, 0]
        minus = F_m[0, 0] * grad_phi[i - 1] + F_m[i, 0]
        out[d + 1 + i] = plus - minus
    return out

"""Involution residuals of the straightened problem and their transport in time.

Interior (each side, x_1 > 0):
    rho relation   rho(p, S) - 1/det F
    inv1           F_lk d_l^Phi F_ij - F_lj d_l^Phi F_ik      (j < k)
    inv2           d_l^Phi (rho F_lj)
Boundary (x_1 = 0, N = (1, -grad' phi)):
    inv3           [rho F_jN]
    inv4           [rho F_kN F_ij - rho F_jN F_ik]             (j < k)
    inv5           F_jN+-                                      (j >= 2)
    key1           rho F_1N - varrho(F) on each side
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.models.layout import UnknownLayout
from app.models.material import MaterialParams
from app.models.thermo_state import density_from_F
from app.services.interface.jump import varrho_eval
from app.services.straightening.lift import Lift
from app.services.straightening.operators import phi_differentials

logger = logging.getLogger(__name__)

INTERIOR_NAMES = ("rho", "inv1", "inv2")
BOUNDARY_NAMES = ("inv3", "inv4", "inv5", "key1")


@dataclass
class InvolutionResiduals:
    """Residual fields of all constraint families.

    Interior entries hold one array per side (minus, plus); boundary entries
    are arrays on the boundary torus.
    """
    rho: Tuple[np.ndarray, np.ndarray]
    inv1: Tuple[np.ndarray, np.ndarray]
    inv2: Tuple[np.ndarray, np.ndarray]
    inv3: np.ndarray
    inv4: np.ndarray
    inv5: np.ndarray
    key1: np.ndarray

    def max_norms(self, interior_only: bool = False) -> Dict[str, float]:
        """Max-norm of every family over both sides."""
        out = {}
        for name in INTERIOR_NAMES:
            minus, plus = getattr(self, name)
            out[name] = float(max(_interior_max(minus), _interior_max(plus)))
        if not interior_only:
            for name in BOUNDARY_NAMES:
                values = getattr(self, name)
                out[name] = float(np.max(np.abs(values))) if values.size else 0.0
        return out


def _interior_max(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def rho_relation_residual(rho, F) -> np.ndarray:
    """rho - 1/det F for an explicitly given density."""
    return np.asarray(rho, dtype=float) - density_from_F(F)


def _F_last(F: np.ndarray) -> np.ndarray:
    return np.moveaxis(F, (0, 1), (-2, -1))


def interior_residuals(U: np.ndarray, lift: Lift, params: MaterialParams):
    """(rho relation, inv1, inv2) on one side."""
    layout = UnknownLayout(params.dim)
    d = params.dim
    p, _, F, S = layout.split(U)
    rho_F = density_from_F(_F_last(F))
    rho_eos = params.eos().density_from_pressure(p, S)
    rho_res = rho_relation_residual(rho_eos, _F_last(F))

    diffs = phi_differentials(U[layout.F_slice], lift).d
    # dF[l][a, k] = d_l^Phi F_ak
    dF = [np.swapaxes(g.reshape((d, d) + g.shape[1:]), 0, 1) for g in diffs]
    inv1 = []
    for j in range(d):
        for k in range(j + 1, d):
            for i in range(d):
                term = sum(F[l, k] * dF[l][i, j] - F[l, j] * dF[l][i, k] for l in range(d))
                inv1.append(term)
    inv1 = np.stack(inv1) if inv1 else np.zeros((0,) + U.shape[1:])

    flux = (rho_F[None, None] * F).reshape((d * d,) + U.shape[1:])
    # flux index l*d + j holds rho F_lj
    dflux = phi_differentials(flux, lift).d
    inv2 = np.stack([
        sum(dflux[l][l * d + j] for l in range(d)) for j in range(d)
    ])
    return rho_res, inv1, inv2


def boundary_residuals(
    U_minus: np.ndarray,
    U_plus: np.ndarray,
    grad_phi: np.ndarray,
    params: MaterialParams,
):
    """(inv3, inv4, inv5, key1) from trace arrays (n, *boundary_shape)."""
    layout = UnknownLayout(params.dim)
    d = params.dim

    def side(U):
        _, _, F, _ = layout.split(U)
        rho = density_from_F(_F_last(F))
        FN = F[0] - sum(grad_phi[l - 1][None] * F[l] for l in range(1, d))
        return F, rho, FN

    F_m, rho_m, FN_m = side(U_minus)
    F_p, rho_p, FN_p = side(U_plus)
    inv3 = rho_p * FN_p - rho_m * FN_m

    inv4 = []
    for j in range(d):
        for k in range(j + 1, d):
            for i in range(d):
                plus = rho_p * (FN_p[k] * F_p[i, j] - FN_p[j] * F_p[i, k])
                minus = rho_m * (FN_m[k] * F_m[i, j] - FN_m[j] * F_m[i, k])
                inv4.append(plus - minus)
    inv4 = np.stack(inv4)
    inv5 = np.concatenate([FN_m[1:], FN_p[1:]])
    key1 = np.stack([
        rho_m * FN_m[0] - varrho_eval(_F_last(F_m))[0],
        rho_p * FN_p[0] - varrho_eval(_F_last(F_p))[0],
    ])
    return inv3, inv4, inv5, key1


def involution_residuals(
    U_minus: np.ndarray,
    U_plus: np.ndarray,
    lift_minus: Lift,
    lift_plus: Lift,
    params: MaterialParams,
) -> InvolutionResiduals:
    """All constraint residuals of a two-sided straightened state.

    Args:
        U_minus: Field on the minus side (n, *grid)
        U_plus: Field on the plus side
        lift_minus: Lift Phi-
        lift_plus: Lift Phi+
        params: Material parameters

    Returns:
        InvolutionResiduals with interior fields per side and boundary arrays
    """
    interior_m = interior_residuals(U_minus, lift_minus, params)
    interior_p = interior_residuals(U_plus, lift_plus, params)
    st = lift_plus.stencils
    grad_phi = np.stack(st.boundary_grad(lift_plus.phi))
    boundary = boundary_residuals(st.trace(U_minus), st.trace(U_plus), grad_phi, params)
    return InvolutionResiduals(
        rho=(interior_m[0], interior_p[0]),
        inv1=(interior_m[1], interior_p[1]),
        inv2=(interior_m[2], interior_p[2]),
        inv3=boundary[0], inv4=boundary[1], inv5=boundary[2], key1=boundary[3],
    )


def _window(s: np.ndarray, start: float, length: float):
    """sin^4 window on [start, start + length] and its derivative."""
    theta = np.pi * (s - start) / length
    inside = (s > start) & (s < start + length)
    sn, cs = np.sin(theta), np.cos(theta)
    value = np.where(inside, sn ** 4, 0.0)
    slope = np.where(inside, 4.0 * sn ** 3 * cs * np.pi / length, 0.0)
    return value, slope


def diffeomorphism_perturbation(
    U: np.ndarray,
    lift: Lift,
    params: MaterialParams,
    amplitude: float = 0.05,
    wavenumber: int = 1,
) -> np.ndarray:
    """Linearized change of U when the reference map X(y) becomes X + eps zeta.

    With G = grad zeta (physical coordinates) the deformation gradient moves by
    F' = -F G F, the density by rho' = rho tr(F G) and the pressure by
    c^2 rho' at fixed entropy; velocity and entropy are unchanged. The
    resulting field satisfies every interior involution of the continuous
    problem, so its discrete residual is pure truncation error. zeta is
    supported in the middle three quarters of (0, x_max) away from the front,
    along the normal distance sign * Phi.

    Args:
        U: State field on one side (n, *grid)
        lift: Lift of that side
        params: Material parameters
        amplitude: Size of zeta
        wavenumber: Tangential wavenumber of zeta

    Returns:
        Perturbation field shaped like U
    """
    grid = lift.grid
    d = params.dim
    layout = UnknownLayout(d)
    p, _, F, S = layout.split(U)
    coords = grid.coordinates()
    distance = lift.sign * lift.Phi
    bump, bump_slope = _window(distance, grid.x_max / 8.0, 0.75 * grid.x_max)
    phase = 2.0 * np.pi * wavenumber * sum(coords[1:])
    wave, wave_slope = np.cos(phase), -2.0 * np.pi * wavenumber * np.sin(phase)
    weights = 0.5 ** np.arange(d)

    # G[a, m] = d zeta_a / d y_m
    grad = [lift.sign * bump_slope * wave] + [bump * wave_slope] * (d - 1)
    G = amplitude * np.stack([np.stack([w * g for g in grad]) for w in weights])
    FG = np.einsum("ab...,bc...->ac...", F, G)
    dF = -np.einsum("ab...,bc...->ac...", FG, F)
    rho = density_from_F(_F_last(F))
    drho = rho * np.einsum("aa...->...", FG)
    dp = params.eos().sound_speed_sq(rho, S) * drho
    zero = np.zeros_like(p)
    return layout.assemble(dp, np.zeros((d,) + p.shape), dF, zero)


def linearized_residual_norms(
    U_minus: np.ndarray,
    U_plus: np.ndarray,
    V_minus: np.ndarray,
    V_plus: np.ndarray,
    lift_minus: Lift,
    lift_plus: Lift,
    psi: np.ndarray,
    params: MaterialParams,
    eps: float = 1e-6,
) -> Dict[str, float]:
    """Max-norms of (R(U + eps V, phi + eps psi) - R(U - eps V, phi - eps psi)) / (2 eps)."""

    def evaluate(sign: float) -> InvolutionResiduals:
        lifts = [
            Lift(l.grid, l.sign, l.phi + sign * eps * psi, l.dt_phi, l.profile, l.stencils)
            for l in (lift_minus, lift_plus)
        ]
        return involution_residuals(U_minus + sign * eps * V_minus, U_plus + sign * eps * V_plus,
                                    lifts[0], lifts[1], params)

    plus, minus = evaluate(+1.0), evaluate(-1.0)
    out = {}
    for name in INTERIOR_NAMES:
        diff = [(a - b) / (2.0 * eps) for a, b in zip(getattr(plus, name), getattr(minus, name))]
        out[name] = max(_interior_max(diff[0]), _interior_max(diff[1]))
    for name in BOUNDARY_NAMES:
        diff = (getattr(plus, name) - getattr(minus, name)) / (2.0 * eps)
        out[name] = _interior_max(diff)
    return out


@dataclass
class DriftSeries:
    """Max-norm of each involution family over time.

    Attributes:
        times: Record times
        values: name -> max-norm at each record time
    """
    times: List[float] = field(default_factory=list)
    values: Dict[str, List[float]] = field(default_factory=dict)

    def append(self, t: float, norms: Dict[str, float]) -> None:
        self.times.append(float(t))
        for name, value in norms.items():
            self.values.setdefault(name, []).append(float(value))

    def final(self) -> Dict[str, float]:
        return {name: vals[-1] for name, vals in self.values.items()}

    def growth(self) -> Dict[str, float]:
        """Final minus initial max-norm per family."""
        return {name: vals[-1] - vals[0] for name, vals in self.values.items()}


def involution_transport_check(
    series: Sequence[Tuple[float, Dict[str, float]]],
    refined: Optional[Sequence[Tuple[float, Dict[str, float]]]] = None,
) -> Dict:
    """Drift of involution residuals along a run, and its refinement order.

    Args:
        series: (t, max-norms) records of one run
        refined: Same run on the grid refined by two, if available

    Returns:
        Dict with the drift series, final drifts and, with ``refined``, the
        observed order log2(final_h / final_{h/2}) per family
    """
    drift = DriftSeries()
    for t, norms in series:
        drift.append(t, norms)
    report = {"times": drift.times, "drift": drift.values, "final": drift.final()}
    if refined is not None:
        fine = DriftSeries()
        for t, norms in refined:
            fine.append(t, norms)
        orders = {}
        for name, coarse_value in drift.final().items():
            fine_value = fine.final().get(name, 0.0)
            if coarse_value > 0.0 and fine_value > 0.0:
                orders[name] = float(np.log2(coarse_value / fine_value))
        report["order"] = orders
    logger.info(f"Involution drift over {len(drift.times)} records: {drift.final()}")
    return report

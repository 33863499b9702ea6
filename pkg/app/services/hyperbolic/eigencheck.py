"""Eigenstructure of the boundary matrix d_t phi A0 - N_l A_l on a contact front."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from app.core.errors import MassFluxNonzero, MultiplicityMismatch
from app.models.front import FrontGeometry
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState
from app.services.hyperbolic.assembly import assemble_A, normal_matrix

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-8
MASS_FLUX_TOL = 1e-10


def cluster_eigenvalues(values: np.ndarray, scale: float, tol: float = CLUSTER_TOL) -> List[Tuple[float, int]]:
    """Group sorted eigenvalues lying within tol*scale of their neighbour.

    Returns a list of (mean value, multiplicity) in increasing order.
    """
    values = np.sort(np.asarray(values, dtype=float))
    width = tol * max(scale, 1.0)
    clusters: List[List[float]] = []
    for lam in values:
        if clusters and abs(lam - clusters[-1][-1]) <= width:
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    return [(float(np.mean(c)), len(c)) for c in clusters]


@dataclass
class SideSpectrum:
    """Spectrum of one side of the front."""
    eigenvalues: np.ndarray
    clusters: List[Tuple[float, int]]
    expected: List[Tuple[float, int]]
    mass_flux: float

    def to_dict(self) -> Dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "clusters": [[v, m] for v, m in self.clusters],
            "expected": [[v, m] for v, m in self.expected],
            "mass_flux": self.mass_flux,
        }


@dataclass
class EigenReport:
    """Result of the boundary-matrix eigenstructure check.

    Attributes:
        dim: Space dimension
        minus: Spectrum on the minus side
        plus: Spectrum on the plus side
        signature: (negative, positive, zero) counts of the doubled system
        expected_signature: (2d, 2d, 2(d^2-d+2))
    """
    dim: int
    minus: SideSpectrum
    plus: SideSpectrum
    signature: Tuple[int, int, int] = (0, 0, 0)
    expected_signature: Tuple[int, int, int] = (0, 0, 0)
    notes: List[str] = field(default_factory=list)

    @property
    def signature_matches(self) -> bool:
        return self.signature == self.expected_signature

    def to_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "minus": self.minus.to_dict(),
            "plus": self.plus.to_dict(),
            "signature": list(self.signature),
            "expected_signature": list(self.expected_signature),
            "signature_matches": self.signature_matches,
        }


def expected_pattern(state: ThermoState, front: FrontGeometry, params: MaterialParams) -> List[Tuple[float, int]]:
    """Analytic eigenvalues with multiplicities for one side.

    The nonzero eigenvalues are +-sqrt(|N|^2 + sum_k (rho a_k F_kN)^2) once and
    +-sqrt(sum_k (rho a_k F_kN)^2) with multiplicity d-1; zero has multiplicity d^2-d+2.
    """
    d = params.dim
    N = front.normal
    rho = state.density
    FN = front.F_N(state.F)
    weighted = float(np.sum((rho * np.asarray(params.elastic) * FN) ** 2))
    mu_fast = float(np.sqrt(float(N @ N) + weighted))
    mu_slow = float(np.sqrt(weighted))
    pattern = [(-mu_fast, 1), (-mu_slow, d - 1), (0.0, d * d - d + 2), (mu_slow, d - 1), (mu_fast, 1)]
    return pattern


def _side_spectrum(state: ThermoState, front: FrontGeometry, params: MaterialParams,
                   tol: float, mass_tol: float) -> SideSpectrum:
    N = front.normal
    m_N = float(state.density * (front.normal_component(state.velocity) - front.dt_phi))
    if abs(m_N) > mass_tol:
        raise MassFluxNonzero(f"mass flux m_N = {m_N:.3e} exceeds {mass_tol:.1e}")
    mats = assemble_A(state, params)
    M = normal_matrix(mats[0], mats[1:], front.dt_phi, N)
    eig = np.linalg.eigvalsh(M)
    scale = float(np.max(np.abs(M)))
    clusters = cluster_eigenvalues(eig, scale, tol)
    expected = expected_pattern(state, front, params)
    return SideSpectrum(eig, clusters, expected, m_N)


def _matches(clusters: List[Tuple[float, int]], expected: List[Tuple[float, int]], scale: float, tol: float) -> bool:
    if len(clusters) != len(expected):
        return False
    width = 10.0 * tol * max(scale, 1.0)
    return all(
        m_got == m_exp and abs(v_got - v_exp) <= width
        for (v_got, m_got), (v_exp, m_exp) in zip(clusters, expected)
    )


def boundary_matrix_eigencheck(
    state_minus: ThermoState,
    state_plus: ThermoState,
    front: FrontGeometry,
    params: MaterialParams,
    tol: float = CLUSTER_TOL,
    mass_tol: float = MASS_FLUX_TOL,
) -> EigenReport:
    """Diagonalize the boundary matrix on both sides and compare with the analytic list.

    Args:
        state_minus: Trace U- on the front
        state_plus: Trace U+ on the front
        front: Front geometry at the point
        params: Material parameters
        tol: Relative clustering tolerance for multiplicities
        mass_tol: Tolerance on |m_N|

    Returns:
        EigenReport with per-side spectra and the doubled-system signature

    Raises:
        MassFluxNonzero: If |m_N| > mass_tol on either side
        MultiplicityMismatch: If the numerical spectrum does not follow the pattern
    """
    d = params.dim
    sides = []
    for state in (state_minus, state_plus):
        spec = _side_spectrum(state, front, params, tol, mass_tol)
        scale = max(abs(v) for v, _ in spec.expected)
        if not _matches(spec.clusters, spec.expected, scale, tol):
            raise MultiplicityMismatch(
                f"spectrum {spec.clusters} does not match expected {spec.expected}"
            )
        sides.append(spec)

    all_eig = np.concatenate([s.eigenvalues for s in sides])
    zero_width = 10.0 * tol * max(1.0, float(np.max(np.abs(all_eig))))
    signature = (
        int(np.sum(all_eig < -zero_width)),
        int(np.sum(all_eig > zero_width)),
        int(np.sum(np.abs(all_eig) <= zero_width)),
    )
    expected_signature = (2 * d, 2 * d, 2 * (d * d - d + 2))
    report = EigenReport(d, sides[0], sides[1], signature, expected_signature)
    logger.debug(f"Eigencheck d={d}: signature {signature}")
    return report

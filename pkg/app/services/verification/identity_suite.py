"""Seeded identity suites behind ``verify-identities`` and ``check-hyperbolicity``.

Every suite returns :class:`IdentityRecord` rows (one identity per row: name,
grid, residual, observed order) that are written as JSONL. Sample counts are
arguments so the unit tests can run the same code at reduced size.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import ThermoelasticError, ThermoelasticNumericalError
from app.models.front import FrontGeometry
from app.models.grid import Grid
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState, density_from_F
from app.services.hyperbolic.assembly import (
    LiftDerivatives,
    assemble_A0_dense,
    assemble_Ai_dense,
    expanded_residual,
    symmetric_residual,
)
from app.services.hyperbolic.calA import assemble_J_and_calA
from app.services.hyperbolic.eigencheck import boundary_matrix_eigencheck
from app.services.interface.background import BackgroundState, build_background
from app.services.interface.jump import BoundaryForm, JumpState, boundary_operator, rh_residual
from app.services.interface.rigidity import rigidity_probe
from app.services.linearized.auxiliary import R_fields, psi_gradient_residual
from app.services.linearized.basic_state import BasicState, build_basic_state
from app.services.linearized.cancellation import cancellation_check
from app.services.linearized.operators import (
    alinhac_residual,
    apply_Bprime_e,
    apply_Lprime_e,
    from_good_unknowns,
    good_unknowns,
    linearization_errors,
)
from app.services.linearized.wvars import LinearField
from app.services.solver.integrator import doubling_steps, run
from app.services.solver.sources import BoundaryBump, InteriorBump, SourceModel
from app.services.stability.condition import Stretches, evaluate_stretches, exact_product_identity
from app.services.straightening.involutions import diffeomorphism_perturbation, involution_transport_check

logger = logging.getLogger(__name__)

ROUNDOFF_TOL = 1e-10
BACKGROUND_TOL = 1e-12
GAMMA_LAW_ENTROPY = math.log(0.5) - 1.4 * math.log(2.0)
ORDER_TARGET = 1.8
DRIFT_FLOOR = 1e-8
SLOPE_BAND = 0.1


@dataclass
class IdentityRecord:
    """One line of the identity report.

    Attributes:
        name: Identity name
        dim: Space dimension
        residual: Worst residual (or ratio) over the samples
        passed: Verdict against the identity's tolerance
        grid: Grid label "n1xn_tan" for grid-based identities
        order: Observed convergence order (or log-log slope)
        samples: Number of samples or runs
        details: Extra numbers
    """
    name: str
    dim: int
    residual: float
    passed: bool
    grid: Optional[str] = None
    order: Optional[float] = None
    samples: int = 1
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return asdict(self)


def _grid_label(grids: Union[Grid, Sequence[Grid]]) -> str:
    if isinstance(grids, Grid):
        grids = [grids]
    return ",".join(f"{g.n1}x{g.n_tan}" for g in grids)


def _order(coarse: float, fine: float) -> float:
    if coarse <= 0.0 or fine <= 0.0:
        return float("inf") if fine < coarse else float("nan")
    return math.log2(coarse / fine)


# ---------------------------------------------------------------------------
# Random samples
# ---------------------------------------------------------------------------

def random_F(rng: np.random.Generator, dim: int, spread: float = 0.15) -> np.ndarray:
    """Diagonally dominant F with det F > 0."""
    while True:
        F = np.diag(rng.uniform(0.7, 1.3, size=dim)) + spread * rng.normal(size=(dim, dim))
        if np.linalg.det(F) > 0.1:
            return F


def random_state(rng: np.random.Generator, params: MaterialParams) -> ThermoState:
    """Admissible state: det F > 0, EOS pressure, moderate velocity."""
    F = random_F(rng, params.dim)
    entropy = float(rng.uniform(-0.5, 0.5))
    p = float(params.eos().pressure(float(density_from_F(F)), entropy))
    return ThermoState(p, 0.3 * rng.normal(size=params.dim), F, entropy)


def project_tangential_FN(F: np.ndarray, grad_phi: np.ndarray) -> np.ndarray:
    """Set F_1j = sum_l d_l phi F_lj (j >= 2), so that F_jN = 0 for j >= 2."""
    out = F.copy()
    for j in range(1, F.shape[0]):
        out[0, j] = float(np.dot(grad_phi, F[1:, j]))
    return out


def constrained_jump_state(rng: np.random.Generator, params: MaterialParams) -> JumpState:
    """Traces with F_jN+- = 0 (j >= 2) and zero mass flux through a tilted moving front."""
    d = params.dim
    grad_phi = 0.3 * rng.normal(size=d - 1)
    states = []
    for _ in range(2):
        while True:
            F = project_tangential_FN(random_F(rng, d), grad_phi)
            if np.linalg.det(F) > 0.1:
                break
        entropy = float(rng.uniform(-0.5, 0.5))
        p = float(params.eos().pressure(float(density_from_F(F)), entropy))
        states.append(ThermoState(p, 0.3 * rng.normal(size=d), F, entropy))
    minus, plus = states
    normal = np.concatenate([[1.0], -grad_phi])
    dt_phi = float(normal @ plus.velocity)
    minus.velocity[0] += dt_phi - float(normal @ minus.velocity)
    return JumpState(minus, plus, FrontGeometry.from_gradient(grad_phi, dt_phi))


def smooth_field(grid: Grid, n: int, rng: np.random.Generator, amplitude: float = 0.1) -> np.ndarray:
    """Component-first field c_i exp(-x_1^2) cos(2 pi (x' + theta_i)), shape (n, *grid)."""
    coords = grid.coordinates()
    out = np.empty((n,) + grid.shape)
    for i in range(n):
        phase = 2.0 * np.pi * (sum(coords[1:]) + rng.uniform())
        out[i] = amplitude * rng.normal() * np.exp(-coords[0] ** 2) * np.cos(phase)
    return out


def smooth_boundary_field(grid: Grid, rng: np.random.Generator, amplitude: float = 0.05) -> np.ndarray:
    coords = grid.boundary_coordinates()
    return amplitude * np.cos(2.0 * np.pi * (sum(coords) + rng.uniform()))


# ---------------------------------------------------------------------------
# Structure and eigenstructure
# ---------------------------------------------------------------------------

def structure_suite(params: MaterialParams, rng: np.random.Generator, samples: int = 1000) -> List[IdentityRecord]:
    """Symmetry of A_i and cal_A_i, positivity of A0 and cal_A0, and the expanded-form oracle."""
    d = params.dim
    n = params.n_unknowns
    asym = 0.0
    cholesky_failures = 0
    oracle = 0.0
    for _ in range(samples):
        U = random_state(rng, params).to_vector()
        mats = [assemble_A0_dense(U, params)] + [assemble_Ai_dense(U, params, i) for i in range(d)]
        try:
            cal = assemble_J_and_calA(U, LiftDerivatives.flat(d), params)
            mats += list(cal.cal_A)
            positive = [mats[0], cal.cal_A[0]]
        except ThermoelasticError:
            positive = [mats[0]]
        for M in mats:
            asym = max(asym, float(np.max(np.abs(M - M.T))) / max(1.0, float(np.max(np.abs(M)))))
        for M in positive:
            try:
                np.linalg.cholesky(M)
            except np.linalg.LinAlgError:
                cholesky_failures += 1
        dt_U = rng.normal(size=n)
        grad_U = [rng.normal(size=n) for _ in range(d)]
        sym = symmetric_residual(U, dt_U, grad_U, params)
        exp = expanded_residual(U, dt_U, grad_U, params)
        oracle = max(oracle, float(np.max(np.abs(sym - exp)) / max(1.0, float(np.max(np.abs(sym))))))
    return [
        IdentityRecord("symmetry", d, asym, asym <= BACKGROUND_TOL, samples=samples),
        IdentityRecord("positive_definite_A0", d, float(cholesky_failures), cholesky_failures == 0,
                       samples=samples),
        IdentityRecord("expanded_form_oracle", d, oracle, oracle <= ROUNDOFF_TOL, samples=samples),
    ]


def eigen_suite(params: MaterialParams, rng: np.random.Generator, samples: int = 200) -> List[IdentityRecord]:
    """Boundary-matrix spectrum and doubled-system signature on constrained traces."""
    failures = 0
    signatures = 0
    for _ in range(samples):
        js = constrained_jump_state(rng, params)
        try:
            report = boundary_matrix_eigencheck(js.minus, js.plus, js.front, params)
        except ThermoelasticNumericalError as exc:
            logger.warning(f"Eigenstructure sample failed: {exc}")
            failures += 1
            continue
        signatures += int(report.signature_matches)
    return [
        IdentityRecord("boundary_spectrum", params.dim, float(failures), failures == 0, samples=samples),
        IdentityRecord("doubled_signature", params.dim, float(samples - signatures),
                       signatures == samples, samples=samples),
    ]


# ---------------------------------------------------------------------------
# Jump algebra and rigidity
# ---------------------------------------------------------------------------

def random_background(rng: np.random.Generator, params: MaterialParams) -> BackgroundState:
    stretches = rng.uniform(0.8, 1.2, size=params.dim)
    fraction = rng.uniform(0.02, 0.3)
    return build_background(stretches, stretches[0] * (1.0 - fraction), float(rng.uniform(-0.5, 0.5)), params)


def jump_suite(params: MaterialParams, rng: np.random.Generator, samples: int = 1000) -> List[IdentityRecord]:
    """Form equivalence of the boundary operator, background jump residuals, gamma-law example."""
    d = params.dim
    forms = 0.0
    for _ in range(samples):
        js = constrained_jump_state(rng, params)
        general = boundary_operator(js, params, BoundaryForm.GENERAL)
        varrho = boundary_operator(js, params, BoundaryForm.VARRHO)
        forms = max(forms, float(np.max(np.abs(general - varrho))))
    backgrounds = 0.0
    for _ in range(max(1, samples // 10)):
        bg = random_background(rng, params)
        scale = max(1.0, abs(bg.pressure(+1)))
        backgrounds = max(backgrounds, float(np.max(np.abs(rh_residual(bg.traces(), params)))) / scale,
                          bg.jump_relation_residual())
    records = [
        IdentityRecord("boundary_forms_agree", d, forms, forms <= ROUNDOFF_TOL, samples=samples),
        IdentityRecord("background_rh_residual", d, backgrounds, backgrounds <= BACKGROUND_TOL,
                       samples=max(1, samples // 10)),
    ]
    if d == 2 and params.gamma == 1.4 and params.p_inf == 0.0:
        bg = build_background([1.0, 1.0], 0.5, 0.0, params)
        gap = abs(bg.entropy(-1) - GAMMA_LAW_ENTROPY)
        records.append(IdentityRecord("gamma_law_background", d, gap, gap <= ROUNDOFF_TOL,
                                      details={"s_minus": bg.entropy(-1)}))
    return records


def rigidity_suite(params: MaterialParams, rng: np.random.Generator, states: int = 20, trials: int = 100,
                   threads: int = 1) -> List[IdentityRecord]:
    """Trivial-root-only probe at random U+, plus the entropy-jump witness from a background."""
    d = params.dim
    nontrivial = 0
    worst = 0.0
    for k in range(states):
        report = rigidity_probe(random_state(rng, params), params, trials=trials,
                                seed=int(rng.integers(2 ** 32)), threads=threads)
        nontrivial += len(report.nontrivial_roots)
        worst = max([worst] + [t.distance for t in report.converged])
    bg = random_background(rng, params)
    start = bg.state(-1).to_vector()[1:-1] * 1.01
    witness = rigidity_probe(bg.state(+1), params, entropy_jump=bg.entropy(-1) - bg.entropy(+1),
                             starts=[start])
    return [
        IdentityRecord("rigidity_trivial_roots", d, worst, nontrivial == 0, samples=states * trials,
                       details={"statement": "no nontrivial root found" if nontrivial == 0
                                else "nontrivial roots found", "nontrivial": nontrivial}),
        IdentityRecord("rigidity_entropy_witness", d, float(len(witness.nontrivial_roots)),
                       bool(witness.nontrivial_roots), samples=1),
    ]


# ---------------------------------------------------------------------------
# Stability constants
# ---------------------------------------------------------------------------

def _random_fraction(rng: np.random.Generator, low: int = 1, high: int = 40) -> Fraction:
    return Fraction(int(rng.integers(low, high)), int(rng.integers(low, high)))


def stability_suite(rng: np.random.Generator, exact_samples: int = 10_000,
                    float_samples: int = 100_000) -> List[IdentityRecord]:
    """Exact C1 C3 = C2 C4, agreement of the two d = 3 criteria, closed-form examples."""
    exact_failures = 0
    for _ in range(exact_samples):
        f11p = _random_fraction(rng)
        f11m = f11p * Fraction(int(rng.integers(1, 99)), 100)
        if not exact_product_identity(f11p, f11m, _random_fraction(rng), _random_fraction(rng)):
            exact_failures += 1
    compared = disagreements = 0
    for _ in range(float_samples):
        f22, f33 = rng.uniform(0.3, 3.0, size=2)
        verdict = evaluate_stretches(Stretches(3, 1.0, float(rng.uniform(0.3, 0.999)), float(f22), float(f33)))
        if verdict.constants["C1"] < 1.0 and verdict.constants["C3"] < 1.0 and not verdict.on_boundary:
            compared += 1
            disagreements += int(not verdict.criteria_agree)
    v2 = evaluate_stretches(Stretches(2, 1.0, 0.5, 1.0))
    v3 = evaluate_stretches(Stretches(3, 1.0, 0.5, 1.0, 1.0))
    threshold_gap = abs(v3.rhs - 1.0 / (2.0 * math.sqrt(2.0)))
    return [
        IdentityRecord("exact_product_identity", 3, float(exact_failures), exact_failures == 0,
                       samples=exact_samples),
        IdentityRecord("criteria_agree", 3, float(disagreements), disagreements == 0, samples=compared),
        IdentityRecord("example_2d", 2, abs(v2.margin - 0.5), v2.satisfied and abs(v2.margin - 0.5) <= 1e-15,
                       details=v2.to_dict()),
        IdentityRecord("isotropic_threshold_3d", 3, threshold_gap, threshold_gap <= BACKGROUND_TOL,
                       details={"rhs": v3.rhs}),
    ]


# ---------------------------------------------------------------------------
# Linearized identities
# ---------------------------------------------------------------------------

BasicFactory = Callable[[Grid], BasicState]


def default_basic_factory(params: MaterialParams, stretches: Optional[Sequence[float]] = None,
                          fraction: float = 0.2, front_amplitude: float = 0.1,
                          bump_amplitude: float = 0.05) -> BasicFactory:
    """Basic states over a stable background, one per grid (all amplitudes zero gives the background)."""
    stretches = list(stretches) if stretches is not None else [1.0] * params.dim
    bg = build_background(stretches, stretches[0] * (1.0 - fraction), 0.0, params)

    def factory(grid: Grid) -> BasicState:
        return build_basic_state(bg, grid, front_amplitude=front_amplitude,
                                 velocity_amplitude=bump_amplitude, pressure_amplitude=bump_amplitude,
                                 norm_order=1)

    return factory


def linearity_suite(basic: BasicState, rng: np.random.Generator) -> List[IdentityRecord]:
    """Additivity and homogeneity of the effective operators on random pairs."""
    grid = basic.grid
    n = basic.layout.n
    a, b = rng.normal(size=2)
    X = [smooth_field(grid, n, rng) for _ in range(4)]
    psi1, psi2 = smooth_boundary_field(grid, rng), smooth_boundary_field(grid, rng)
    interior = 0.0
    for sign in (-1, +1):
        lhs = apply_Lprime_e(a * X[0] + b * X[1], basic, sign)
        rhs = a * apply_Lprime_e(X[0], basic, sign) + b * apply_Lprime_e(X[1], basic, sign)
        interior = max(interior, float(np.max(np.abs(lhs - rhs))) / max(1.0, float(np.max(np.abs(rhs)))))
    st = basic.stencils
    traces = [st.trace(x) for x in X]
    lhs = apply_Bprime_e(a * traces[0] + b * traces[2], a * traces[1] + b * traces[3], a * psi1 + b * psi2, basic)
    rhs = (a * apply_Bprime_e(traces[0], traces[1], psi1, basic)
           + b * apply_Bprime_e(traces[2], traces[3], psi2, basic))
    boundary = float(np.max(np.abs(lhs - rhs))) / max(1.0, float(np.max(np.abs(rhs))))
    label = _grid_label(grid)
    return [
        IdentityRecord("linearity_Lprime_e", basic.dim, interior, interior <= 1e-12, grid=label),
        IdentityRecord("linearity_Bprime_e", basic.dim, boundary, boundary <= 1e-12, grid=label),
    ]


def linearization_suite(factory: BasicFactory, grids: Sequence[Grid], rng: np.random.Generator,
                        directions: int = 5) -> List[IdentityRecord]:
    """Directional consistency of B' and the h-order of the Alinhac identity."""
    basic = factory(grids[0])
    n = basic.layout.n
    slopes = []
    for _ in range(directions):
        Vm, Vp = smooth_field(basic.grid, n, rng), smooth_field(basic.grid, n, rng)
        psi = smooth_boundary_field(basic.grid, rng)
        st = basic.stencils
        slopes.append(linearization_errors(basic, st.trace(Vm), st.trace(Vp), psi)["slope"])
    worst_slope = max(slopes, key=lambda s: abs(s - 1.0))
    records = [IdentityRecord("linearization_slope", basic.dim, abs(worst_slope - 1.0),
                              abs(worst_slope - 1.0) <= SLOPE_BAND, grid=_grid_label(grids[0]),
                              order=worst_slope, samples=directions)]

    seed = int(rng.integers(2 ** 32))
    residuals = []
    for grid in grids:
        local = np.random.default_rng(seed)
        b = factory(grid)
        V = smooth_field(grid, b.layout.n, local)
        psi = smooth_boundary_field(grid, local)
        interior = (slice(None),) + (slice(2, -2),) + (slice(None),) * (grid.dim - 1)
        residuals.append(max(float(np.max(np.abs(alinhac_residual(V, psi, b, s)[interior])))
                             for s in (-1, +1)))
    order = _order(residuals[-2], residuals[-1]) if len(residuals) >= 2 else None
    records.append(IdentityRecord("alinhac_identity", basic.dim, residuals[-1],
                                  order is not None and order >= ORDER_TARGET, grid=_grid_label(grids),
                                  order=order, samples=len(grids), details={"residuals": residuals}))
    return records


def reconstruction_suite(basic: BasicState, rng: np.random.Generator) -> List[IdentityRecord]:
    """Good-unknown round trip and the recovery of grad' psi from R_j."""
    grid = basic.grid
    n = basic.layout.n
    V = (smooth_field(grid, n, rng), smooth_field(grid, n, rng))
    psi = smooth_boundary_field(grid, rng)
    back = from_good_unknowns(good_unknowns(V, psi, basic), psi, basic)
    round_trip = max(float(np.max(np.abs(a - b))) for a, b in zip(back, V))
    Vdot_trace = basic.stencils.trace(V[1])
    R = R_fields(Vdot_trace, psi, basic)
    gradient = float(np.max(np.abs(psi_gradient_residual(R, Vdot_trace, psi, basic))))
    label = _grid_label(grid)
    return [
        IdentityRecord("good_unknown_round_trip", basic.dim, round_trip, round_trip <= ROUNDOFF_TOL, grid=label),
        IdentityRecord("psi_gradient_reconstruction", basic.dim, gradient, gradient <= ROUNDOFF_TOL, grid=label),
    ]


# ---------------------------------------------------------------------------
# Solver-based identities
# ---------------------------------------------------------------------------

def default_sources(grid: Grid) -> SourceModel:
    """Smooth interior pressure bump on the plus side and a bump on the second boundary row."""
    return SourceModel(
        grid,
        interior=[InteriorBump(component="p", side=1, amplitude=0.1, duration=0.4)],
        boundary=[BoundaryBump(row=1, amplitude=0.05, duration=0.4)],
    )


def cancellation_suite(factory: BasicFactory, grids: Sequence[Grid], final_time: float = 0.2,
                       beta: Sequence[int] = (1, 0),
                       zero_jump_factory: Optional[BasicFactory] = None) -> List[IdentityRecord]:
    """Cancellation residual on solver traces over a grid family, and the zero-jump case."""
    residuals = []
    reports = []
    basics = [factory(grid) for grid in grids]
    for grid, basic, steps in zip(grids, basics, doubling_steps(basics, final_time)):
        beta_full = tuple(beta) + (0,) * (basic.dim - len(beta))
        result = run(basic, default_sources(grid), final_time, s=1, record_interval=10 ** 9, steps=steps)
        report = cancellation_check(result.ledger.boundary, basic, beta_full)
        residuals.append(report.cancellation_residual)
        reports.append(report.to_dict())
    order = _order(residuals[-2], residuals[-1]) if len(residuals) >= 2 else None
    dim = grids[0].dim
    records = [IdentityRecord("cancellation", dim, residuals[-1],
                              order is not None and order >= ORDER_TARGET, grid=_grid_label(grids),
                              order=order, samples=len(grids),
                              details={"residuals": residuals, "reports": reports})]
    if zero_jump_factory is not None:
        basic = zero_jump_factory(grids[0])
        beta_full = tuple(beta) + (0,) * (basic.dim - len(beta))
        result = run(basic, default_sources(grids[0]), final_time, s=1, record_interval=10 ** 9)
        report = cancellation_check(result.ledger.boundary, basic, beta_full)
        pieces = max(float(np.max(np.abs(report.pieces[k]))) for k in ("Q1a", "Q2d"))
        records.append(IdentityRecord("cancellation_zero_jump", dim, pieces, pieces == 0.0,
                                      grid=_grid_label(grids[0])))
    return records


def _drift_series(result) -> List[Tuple[float, Dict[str, float]]]:
    rows = result.ledger.rows
    return [(row["t"], {"rho": row["inv_rho"], "inv1": row["inv1"], "inv2": row["inv2"]}) for row in rows]


def involution_initial_data(basic: BasicState, amplitude: float = 0.05) -> LinearField:
    """Linearized reference-map change on both sides, front at rest."""
    params = basic.params
    minus = diffeomorphism_perturbation(basic.U_minus, basic.lift_minus, params, amplitude)
    plus = diffeomorphism_perturbation(basic.U_plus, basic.lift_plus, params, amplitude)
    return LinearField(minus, plus, np.zeros(basic.grid.boundary_shape))


def involution_suite(factory: BasicFactory, grids: Sequence[Grid], final_time: float = 0.2,
                     amplitude: float = 0.05) -> List[IdentityRecord]:
    """Involution drift of source-free runs from involution-compatible data on a grid family.

    Families at round-off level (at most DRIFT_FLOOR on both compared grids)
    count as exact; the others must converge at ORDER_TARGET.
    """
    series = []
    basics = [factory(grid) for grid in grids]
    for grid, basic, steps in zip(grids, basics, doubling_steps(basics, final_time)):
        result = run(basic, SourceModel(grid), final_time, s=1, record_interval=5, track_boundary=False,
                     initial=involution_initial_data(basic, amplitude), steps=steps)
        series.append(_drift_series(result))
    check = involution_transport_check(series[-2], series[-1]) if len(series) >= 2 else \
        involution_transport_check(series[-1])
    finals = dict(series[-1][-1][1])
    coarse = dict(series[-2][-1][1]) if len(series) >= 2 else finals
    resolved = [name for name in finals if max(finals[name], coarse.get(name, 0.0)) > DRIFT_FLOOR]
    orders = check.get("order", {})
    finite = [orders[name] for name in resolved if orders.get(name) is not None and math.isfinite(orders[name])]
    order = min(finite) if finite else None
    worst = max(finals.values()) if finals else 0.0
    if resolved:
        passed = len(finite) == len(resolved) and order >= ORDER_TARGET
    else:
        passed = True
    return [IdentityRecord("involution_drift", grids[0].dim, worst, passed, grid=_grid_label(grids),
                           order=order, samples=len(grids),
                           details={"final": finals, "coarse": coarse, "orders": orders,
                                    "resolved": resolved})]


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------

@dataclass
class SuiteSizes:
    """Sample counts; the defaults are the full acceptance counts."""
    structure: int = 1000
    eigen: int = 200
    jump: int = 1000
    rigidity_states: int = 20
    rigidity_trials: int = 100
    exact: int = 10_000
    floats: int = 100_000
    grids: Tuple[int, ...] = (64, 128, 256)
    n_tan: int = 16
    final_time: float = 0.2

    @classmethod
    def reduced(cls) -> "SuiteSizes":
        return cls(structure=20, eigen=10, jump=20, rigidity_states=1, rigidity_trials=5,
                   exact=100, floats=1000, grids=(32, 64), n_tan=8, final_time=0.2)


def hyperbolicity_suites(params: MaterialParams, seed: int = 0,
                         sizes: Optional[SuiteSizes] = None) -> List[IdentityRecord]:
    """Structure and eigenstructure suites for ``check-hyperbolicity``."""
    sizes = sizes or SuiteSizes()
    rng = np.random.default_rng(seed)
    records = structure_suite(params, rng, sizes.structure) + eigen_suite(params, rng, sizes.eigen)
    _log_summary("hyperbolicity", records)
    return records


def identity_suites(params: MaterialParams, seed: int = 0, sizes: Optional[SuiteSizes] = None,
                    threads: int = 1, include_solver: bool = True) -> List[IdentityRecord]:
    """Every identity suite for one material, in a fixed order.

    Args:
        params: Material parameters (fixes the dimension)
        seed: Root seed of all samples
        sizes: Sample counts and grid family
        threads: Worker threads for the rigidity probe
        include_solver: Also run the cancellation and involution suites (they time-step)

    Returns:
        Records in suite order
    """
    sizes = sizes or SuiteSizes()
    rng = np.random.default_rng(seed)
    records = structure_suite(params, rng, sizes.structure)
    records += eigen_suite(params, rng, sizes.eigen)
    records += jump_suite(params, rng, sizes.jump)
    records += rigidity_suite(params, rng, sizes.rigidity_states, sizes.rigidity_trials, threads)
    records += stability_suite(rng, sizes.exact, sizes.floats)

    grids = [Grid(params.dim, n1, sizes.n_tan * 2 ** k) for k, n1 in enumerate(sizes.grids)]
    factory = default_basic_factory(params)
    basic = factory(grids[0])
    records += linearity_suite(basic, rng)
    records += reconstruction_suite(basic, rng)
    records += linearization_suite(factory, grids, rng)
    if include_solver:
        zero_jump = default_basic_factory(params, fraction=0.0)
        records += cancellation_suite(factory, grids, sizes.final_time, zero_jump_factory=zero_jump)
        background = default_basic_factory(params, front_amplitude=0.0, bump_amplitude=0.0)
        records += involution_suite(background, grids, sizes.final_time)
    _log_summary("identities", records)
    return records


def _log_summary(label: str, records: Sequence[IdentityRecord]) -> None:
    failed = [r.name for r in records if not r.passed]
    logger.info(f"{label}: {len(records) - len(failed)}/{len(records)} identities passed")
    if failed:
        logger.warning(f"{label}: failed {failed}")


def write_identity_report(records: Sequence[IdentityRecord], output_path: Union[str, Path]) -> Path:
    """One JSON object per identity."""
    from app.services.exporters.results_exporter import ResultsExporter

    return ResultsExporter.export_jsonl([r.to_dict() for r in records], output_path)

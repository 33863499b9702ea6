"""Newton probe for contact discontinuities with continuous entropy.

Given the right trace U+ (and the front it moves with, d_t phi = v_N+), the
probe looks for left traces (v-, F-) with prescribed S- that satisfy the whole
Rankine-Hugoniot system, with p- = p(rho(F-), S-) from the EOS. With S- = S+
every root found should be the trivial one U- = U+. A finite probe cannot
prove nonexistence: the report only records what the iterations found.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import linalg

from app.core.errors import ThermoelasticValidationError
from app.models.front import FrontGeometry
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState, density_from_F
from app.services.interface.jump import JumpState, rh_residual

logger = logging.getLogger(__name__)

INVALID_RESIDUAL = 1e100


@dataclass
class TrialResult:
    """Outcome of a single seeded Newton run."""
    trial: int
    converged: bool
    iterations: int
    residual_norm: float
    distance: float
    root: List[float]
    start: List[float]

    def to_dict(self) -> Dict:
        return {
            "trial": self.trial,
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "distance_to_plus": self.distance,
            "root": self.root,
            "start": self.start,
        }


@dataclass
class RigidityReport:
    """Collected trials of a rigidity probe.

    Attributes:
        entropy_jump: Prescribed S- - S+
        trials: All trial results in seed order
        root_tol: Distance below which a root counts as trivial
    """
    entropy_jump: float
    trials: List[TrialResult] = field(default_factory=list)
    root_tol: float = 1e-8

    @property
    def converged(self) -> List[TrialResult]:
        return [t for t in self.trials if t.converged]

    @property
    def not_converged(self) -> List[TrialResult]:
        return [t for t in self.trials if not t.converged]

    @property
    def nontrivial_roots(self) -> List[TrialResult]:
        return [t for t in self.converged if t.distance > self.root_tol]

    @property
    def only_trivial_roots_found(self) -> bool:
        return not self.nontrivial_roots

    def summary(self) -> Dict:
        return {
            "entropy_jump": self.entropy_jump,
            "trials": len(self.trials),
            "converged": len(self.converged),
            "not_converged": len(self.not_converged),
            "nontrivial_roots": len(self.nontrivial_roots),
            "statement": (
                "no nontrivial root found" if self.only_trivial_roots_found
                else "nontrivial roots found"
            ),
        }


@dataclass
class GaussNewtonSolver:
    """Damped Gauss-Newton on ||r(x)||^2 with a finite-difference Jacobian.

    Attributes:
        max_iter: Maximum iterations (default: 60)
        tol: Convergence tolerance on ||r|| (default: 1e-12)
        backtrack: Armijo step reduction factor (default: 0.5)
        fd_step: Relative finite-difference step
    """
    max_iter: int = 60
    tol: float = 1e-12
    backtrack: float = 0.5
    fd_step: float = 1e-7
    armijo: float = 1e-4

    def jacobian(self, fun, x: np.ndarray, r0: np.ndarray) -> np.ndarray:
        Jac = np.empty((r0.size, x.size))
        for k in range(x.size):
            h = self.fd_step * (1.0 + abs(x[k]))
            xp = x.copy()
            xm = x.copy()
            xp[k] += h
            xm[k] -= h
            Jac[:, k] = (fun(xp) - fun(xm)) / (2.0 * h)
        return Jac

    def solve(self, fun, x0: np.ndarray):
        """Return (x, converged, iterations, ||r||)."""
        x = np.array(x0, dtype=float)
        r = fun(x)
        norm = float(np.linalg.norm(r))
        for iteration in range(self.max_iter):
            if norm < self.tol:
                return x, True, iteration, norm
            Jac = self.jacobian(fun, x, r)
            step, *_ = linalg.lstsq(Jac, -r)
            t = 1.0
            accepted = False
            while t > 1e-10:
                trial = x + t * step
                r_trial = fun(trial)
                norm_trial = float(np.linalg.norm(r_trial))
                if norm_trial ** 2 <= (1.0 - 2.0 * self.armijo * t) * norm ** 2:
                    accepted = True
                    break
                t *= self.backtrack
            if not accepted:
                logger.debug(f"Gauss-Newton line search failed at iteration {iteration}, |r|={norm:.3e}")
                return x, norm < self.tol, iteration, norm
            x, r, norm = trial, r_trial, norm_trial
        return x, norm < self.tol, self.max_iter, norm


def _pack(state: ThermoState) -> np.ndarray:
    """Search unknowns (v, F column-major); p follows from the EOS."""
    return np.concatenate([state.velocity, state.F.reshape(-1, order="F")])


def _unpack(x: np.ndarray, dim: int, entropy: float, params: MaterialParams) -> ThermoState:
    F = x[dim:].reshape((dim, dim), order="F")
    pressure = float(params.eos().pressure(float(density_from_F(F)), entropy))
    return ThermoState(pressure, x[:dim].copy(), F, entropy)


def _full_vector(state: ThermoState) -> np.ndarray:
    return np.concatenate([[state.pressure], _pack(state)])


def _run_trial(
    trial: int,
    seed_seq: np.random.SeedSequence,
    u_plus: ThermoState,
    front: FrontGeometry,
    params: MaterialParams,
    spread: float,
    entropy_minus: float,
    solver: GaussNewtonSolver,
    start: Optional[np.ndarray],
) -> TrialResult:
    d = params.dim
    x_plus = _pack(u_plus)
    if start is None:
        rng = np.random.default_rng(seed_seq)
        x0 = x_plus * (1.0 + spread * rng.uniform(-1.0, 1.0, size=x_plus.size))
        x0 += spread * rng.uniform(-1.0, 1.0, size=x_plus.size) * (x_plus == 0.0)
    else:
        x0 = np.asarray(start, dtype=float)

    def residual(x: np.ndarray) -> np.ndarray:
        try:
            js = JumpState(_unpack(x, d, entropy_minus, params), u_plus, front)
            return rh_residual(js, params)
        except ThermoelasticValidationError:
            return np.full(rh_size, INVALID_RESIDUAL)

    rh_size = rh_residual(JumpState(u_plus, u_plus, front), params).size
    x, converged, iterations, norm = solver.solve(residual, x0)
    try:
        root = _full_vector(_unpack(x, d, entropy_minus, params))
    except ThermoelasticValidationError:
        return TrialResult(trial, False, int(iterations), norm, float("inf"), x.tolist(), x0.tolist())
    distance = float(np.linalg.norm(root - _full_vector(u_plus))) + abs(entropy_minus - u_plus.entropy)
    return TrialResult(trial, bool(converged), int(iterations), norm, distance, root.tolist(), x0.tolist())


def rigidity_probe(
    u_plus: ThermoState,
    params: MaterialParams,
    trials: int = 100,
    seed: int = 0,
    spread: float = 0.1,
    entropy_jump: float = 0.0,
    front: Optional[FrontGeometry] = None,
    threads: int = 1,
    starts: Optional[List[np.ndarray]] = None,
    solver: Optional[GaussNewtonSolver] = None,
) -> RigidityReport:
    """Search for roots U- of the jump conditions near U+.

    Args:
        u_plus: Right trace U+
        params: Material parameters
        trials: Number of seeded starts
        seed: Root seed; trial streams come from SeedSequence.spawn
        spread: Relative size of the random start perturbation
        entropy_jump: Prescribed S- - S+ (0 for the rigidity statement)
        front: Front geometry; by default flat and moving with v_N+
        threads: Worker threads (results are ordered by trial either way)
        starts: Explicit starting points (v, F column-major) overriding the random ones
        solver: Gauss-Newton settings

    Returns:
        RigidityReport; non-convergence is recorded, never raised
    """
    solver = solver or GaussNewtonSolver()
    if front is None:
        flat = FrontGeometry.flat(params.dim)
        front = FrontGeometry.flat(params.dim, float(flat.normal_component(u_plus.velocity)))
    entropy_minus = u_plus.entropy + entropy_jump
    n_trials = len(starts) if starts is not None else trials
    seqs = np.random.SeedSequence(seed).spawn(n_trials)

    def job(k: int) -> TrialResult:
        start = starts[k] if starts is not None else None
        return _run_trial(k, seqs[k], u_plus, front, params, spread, entropy_minus, solver, start)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(n_trials)))
    else:
        results = [job(k) for k in range(n_trials)]

    report = RigidityReport(entropy_jump, results)
    summary = report.summary()
    logger.info(
        f"Rigidity probe: {summary['converged']}/{summary['trials']} converged, "
        f"{summary['nontrivial_roots']} nontrivial roots"
    )
    if report.not_converged:
        logger.warning(f"{len(report.not_converged)} Newton trials did not converge")
    return report

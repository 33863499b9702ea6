"""Tests for the linear solver, norms, ledger and probes.

Tests cover:
- Source bumps and source-model validation
- Discrete Sobolev and fractional boundary norms
- LLF dissipation, spectral filter, local speeds and incoming modes
- Runs from zero data: ledger columns, recorded rows, snapshots
- Self-convergence, a plane-wave reduction and ledger reproducibility
- Trace-inequality and tame-estimate probes
"""

import math

import numpy as np
import pytest

from app.core.errors import CFLViolation, ConfigurationError
from app.models.grid import Grid
from app.models.layout import UnknownLayout
from app.services.exporters.results_exporter import ResultsExporter
from app.services.hyperbolic.assembly import LiftDerivatives, assemble_A, combine_A1tilde
from app.services.linearized import LinearField
from app.services.linearized.basic_state import build_basic_state
from app.services.solver import (
    BoundaryBump,
    EnergyLedger,
    InteriorBump,
    NormKind,
    SourceModel,
    boundary_fractional_norm,
    cfl_step,
    discrete_norms,
    doubling_steps,
    energy_multi_indices,
    extend_time_series,
    incoming_modes,
    ledger_columns,
    llf_dissipation,
    local_speeds,
    reflection_coefficients,
    run,
    sobolev_norm,
    spatial_multi_indices,
    spectral_filter,
    tame_estimate_probe,
    tame_ratio,
    time_bump,
    time_bump_derivative,
    trace_inequality_probe,
)
from app.services.straightening import Stencils


class TestSources:
    """Time bumps and source models"""

    def test_time_bump_values(self):
        np.testing.assert_allclose(time_bump([-0.1, 0.0, 0.5, 1.0, 1.2], 1.0), [0.0, 0.0, 1.0, 0.0, 0.0])

    def test_time_bump_derivative(self):
        h = 1e-6
        fd = (time_bump(0.3 + h, 1.0) - time_bump(0.3 - h, 1.0)) / (2 * h)
        assert float(time_bump_derivative(0.3, 1.0)) == pytest.approx(float(fd), rel=1e-6)
        assert float(time_bump_derivative(0.5, 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_interior_source_placement(self, small_grid):
        bump = InteriorBump(component="v1", side=-1, duration=0.2)
        model = SourceModel(small_grid, [bump])
        f_minus, f_plus = model.interior_at(0.1)
        np.testing.assert_allclose(f_minus[1], bump.spatial(small_grid))
        assert not f_plus.any()
        assert not f_minus[0].any()
        assert not any(model.interior_at(0.3)[0].ravel())

    def test_boundary_source_rows(self, small_grid):
        model = SourceModel(small_grid, boundary=[BoundaryBump(row=3, amplitude=0.5, duration=1.0)])
        g = model.boundary_at(0.5)
        assert g.shape == (5, 8)
        np.testing.assert_allclose(np.abs(g[3]).max(), 0.5)
        assert model.has_boundary
        assert model.support_end() == 1.0

    def test_empty_model(self, small_grid):
        model = SourceModel(small_grid)
        assert model.is_zero
        assert not model.has_boundary
        assert model.support_end() is None

    def test_unknown_component_rejected(self, small_grid):
        with pytest.raises(ConfigurationError):
            SourceModel(small_grid, [InteriorBump(component="F33")])

    def test_boundary_row_out_of_range(self, small_grid):
        with pytest.raises(ConfigurationError):
            SourceModel(small_grid, boundary=[BoundaryBump(row=5)])

    @pytest.mark.parametrize("kwargs", [{"side": 0}, {"width": 0.0}, {"duration": -1.0}])
    def test_invalid_bump_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            InteriorBump(**kwargs)


class TestNorms:
    """Discrete Sobolev norms"""

    @pytest.fixture
    def unit_grid(self):
        return Grid(dim=2, n1=8, n_tan=4, x_max=1.0)

    def test_constant_field(self, unit_grid):
        st = Stencils(unit_grid)
        u = np.full((1,) + unit_grid.shape, 2.0)
        assert sobolev_norm(u, st, 1) == pytest.approx(2.0)
        assert sobolev_norm(u, st, 0) == pytest.approx(2.0)

    def test_negative_order_rejected(self, unit_grid):
        with pytest.raises(ConfigurationError):
            sobolev_norm(np.zeros((1,) + unit_grid.shape), Stencils(unit_grid), -1)

    def test_multi_indices(self):
        assert list(spatial_multi_indices([2], 2)) == [(), (2,), (2, 2)]
        assert list(spatial_multi_indices([1, 2], 2)) == [(), (1,), (2,), (1, 1), (1, 2), (2, 2)]

    def test_tangential_norm_ignores_normal_derivatives(self, unit_grid):
        st = Stencils(unit_grid)
        u = unit_grid.coordinates()[0][None]
        assert discrete_norms(u, st, 1, NormKind.TANGENTIAL) == pytest.approx(sobolev_norm(u, st, 0))
        assert discrete_norms(u, st, 1, "full") == pytest.approx(sobolev_norm(u, st, 1))

    def test_fractional_norm_of_constant(self):
        grid = Grid(dim=2, n1=8, n_tan=16)
        w = np.full(grid.boundary_shape, 3.0)
        assert boundary_fractional_norm(w, grid, 1.5) == pytest.approx(3.0)

    def test_fractional_norm_order_ratio(self):
        grid = Grid(dim=2, n1=8, n_tan=16)
        w = np.sin(2 * np.pi * grid.boundary_coordinates()[0])
        ratio = boundary_fractional_norm(w, grid, 0.5) / boundary_fractional_norm(w, grid, 0.0)
        assert ratio == pytest.approx((1 + 4 * np.pi ** 2) ** 0.25, rel=1e-12)

    def test_spacetime_norm_covers_the_whole_window(self):
        grid = Grid(dim=2, n1=8, n_tan=8)
        series = np.ones((11,) + grid.boundary_shape)
        assert boundary_fractional_norm(series, grid, 0.0, dt=0.1) >= 1.0

    def test_reflection_coefficients(self):
        np.testing.assert_allclose(reflection_coefficients(2), [3.0, -2.0])
        np.testing.assert_allclose(reflection_coefficients(3), [6.0, -8.0, 3.0])

    def test_time_extension_continues_polynomials(self):
        t = np.linspace(0.0, 1.0, 101)
        extended = extend_time_series(t[:, None] ** 2, 1.5)
        assert extended.shape[0] == 101 + 32 + 101
        assert extended[101, 0] == pytest.approx(1.01 ** 2, rel=1e-8)
        np.testing.assert_array_equal(extended[-101:], 0.0)

    def test_spacetime_norm_of_series_ending_away_from_zero_converges(self):
        grid = Grid(dim=2, n1=8, n_tan=8)
        norms = []
        for n in (41, 81, 161):
            t = np.linspace(0.0, 1.0, n)
            series = (t ** 2)[:, None] * np.ones(grid.boundary_shape)
            norms.append(boundary_fractional_norm(series, grid, 1.5, dt=1.0 / (n - 1)))
        assert norms[2] == pytest.approx(norms[1], rel=0.05)
        assert norms[1] == pytest.approx(norms[0], rel=0.1)


class TestDiscretization:
    """Dissipation, filtering and characteristic data"""

    def test_llf_example(self):
        u = np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        out = llf_dissipation(u, np.ones(7), -1, 1.0, periodic=False)
        np.testing.assert_allclose(out, [0.0, 0.0, 0.5, -0.75, 0.5, 0.0, 0.0])
        periodic = llf_dissipation(u, np.ones(7), -1, 1.0, periodic=True)
        np.testing.assert_allclose(periodic, [0.0, -0.125, 0.5, -0.75, 0.5, -0.125, 0.0])

    def test_llf_third_order_on_smooth_data(self):
        sizes = []
        for n in (32, 64):
            x = np.arange(n) / n
            out = llf_dissipation(np.sin(2 * np.pi * x), np.ones(n), -1, 1.0 / n, periodic=True)
            sizes.append(np.max(np.abs(out)))
        assert sizes[0] / sizes[1] == pytest.approx(8.0, rel=0.05)

    def test_llf_vanishes_on_linear_data(self):
        u = np.linspace(0.0, 1.0, 9)
        np.testing.assert_allclose(llf_dissipation(u, np.ones(9), -1, 0.125, periodic=False), 0.0, atol=1e-12)

    def test_periodic_llf_conserves(self, rng):
        u = rng.normal(size=(3, 8))
        out = llf_dissipation(u, rng.uniform(0.5, 1.5, size=8), -1, 0.1, periodic=True)
        np.testing.assert_allclose(out.sum(axis=-1), 0.0, atol=1e-12)

    def test_spectral_filter(self, small_grid):
        x2 = small_grid.coordinates()[1]
        smooth = np.ones((1,) + small_grid.shape)
        np.testing.assert_allclose(spectral_filter(smooth, small_grid, [-1]), smooth, atol=1e-14)
        nyquist = np.cos(np.pi * small_grid.n_tan * x2)[None]
        filtered = spectral_filter(nyquist, small_grid, [-1])
        np.testing.assert_allclose(filtered, np.exp(-36.0) * nyquist, atol=1e-14)

    def test_local_speeds(self, flat_basic):
        speeds = local_speeds(flat_basic, +1, 1)
        assert speeds.shape == flat_basic.grid.shape
        assert np.all(speeds > 0.0)

    def test_incoming_mode_count(self, flat_basic):
        for sign in (-1, +1):
            assert incoming_modes(flat_basic, sign).shape == (2, 8, 8)


class TestRun:
    """Time integration from zero data"""

    def test_zero_sources_keep_zero_state(self, flat_basic, small_grid):
        result = run(flat_basic, SourceModel(small_grid), 0.05, record_interval=1)
        np.testing.assert_array_equal(result.final_state.plus, 0.0)
        np.testing.assert_array_equal(result.final_state.psi, 0.0)
        assert result.ledger.columns == ledger_columns(2, 1)
        assert len(result.ledger.rows) == result.steps + 1
        assert result.final_state.t == pytest.approx(0.05)

    def test_last_step_always_recorded(self, flat_basic, small_grid):
        result = run(flat_basic, SourceModel(small_grid), 0.1, record_interval=10 ** 6)
        steps = [row["step"] for row in result.ledger.rows]
        assert steps == [0, result.steps]

    def test_explicit_step_count(self, flat_basic, small_grid):
        steps = math.ceil(0.1 / cfl_step(flat_basic)) + 1
        result = run(flat_basic, SourceModel(small_grid), 0.1, steps=steps)
        assert result.steps == steps
        assert result.dt == pytest.approx(0.1 / steps)

    def test_invalid_step_count_rejected(self, flat_basic, small_grid):
        with pytest.raises(ConfigurationError):
            run(flat_basic, SourceModel(small_grid), 0.1, steps=0)
        with pytest.raises(CFLViolation):
            run(flat_basic, SourceModel(small_grid), 10.0 * cfl_step(flat_basic), steps=1)

    def test_doubling_steps(self, background_2d, small_grid):
        basics = [build_basic_state(background_2d, g) for g in (small_grid, small_grid.refined())]
        counts = doubling_steps(basics, 0.2)
        assert counts[1] == 2 * counts[0]
        for basic, n in zip(basics, counts):
            assert 0.2 / n <= cfl_step(basic) * (1.0 + 1e-12)

    def test_interior_source_run(self, flat_basic, small_grid):
        sources = SourceModel(small_grid, [InteriorBump(amplitude=0.1, duration=0.1)])
        result = run(flat_basic, sources, 0.1)
        assert result.final_state.is_finite()
        summary = result.summary()
        assert {"steps", "dt", "t_final", "rows", "spacetime_V", "spacetime_psi",
                "spacetime_f", "spacetime_g"} <= set(summary)
        assert summary["spacetime_V"] > 0.0
        assert summary["spacetime_f"] > 0.0
        assert summary["spacetime_g"] == 0.0

    def test_energy_columns(self, flat_basic, small_grid):
        sources = SourceModel(small_grid, [InteriorBump(amplitude=0.1, duration=0.1)])
        ledger = run(flat_basic, sources, 0.05, record_interval=1).ledger
        assert energy_multi_indices(2, 1) == [(0, 0), (1, 0), (0, 1)]
        assert np.all(ledger.column("E_tan_b00") >= 0.0)
        assert np.all(ledger.column("E_tan_check") <= 1e-8)

    @pytest.mark.parametrize("homogenized", [False, True])
    def test_boundary_source_run(self, flat_basic, small_grid, homogenized):
        sources = SourceModel(small_grid, boundary=[BoundaryBump(row=2, amplitude=0.1, duration=0.2)])
        result = run(flat_basic, sources, 0.1, homogenized=homogenized)
        assert result.final_state.is_finite()
        assert result.ledger.rows[-1]["source_g_L2"] > 0.0

    def test_snapshots_written(self, flat_basic, small_grid, tmp_path):
        result = run(flat_basic, SourceModel(small_grid), 0.05, snapshot_dir=tmp_path)
        assert [p.name for p in result.snapshots] == ["final_minus.bin", "final_plus.bin", "final_psi.bin"]
        data, meta = ResultsExporter.read_snapshot(tmp_path / "final_plus.bin")
        assert data.shape == (8, 17, 8)
        assert meta["side"] == 1
        assert meta["t"] == pytest.approx(0.05)

    def test_untracked_spacetime_order_rejected(self, flat_basic):
        ledger = EnergyLedger(flat_basic, 1, 0.01)
        ledger.observe(0, LinearField.zeros(flat_basic), (np.zeros((8,) + flat_basic.grid.shape),) * 2,
                       np.zeros((5,) + flat_basic.grid.boundary_shape))
        assert ledger.spacetime_norms(1)["V"] == 0.0
        with pytest.raises(ConfigurationError):
            ledger.spacetime_norms(2)


def _plane_wave_reference(background, params, grid, bump, steps, dt):
    """Heun steps of the plus-side system for data constant in x_2.

    Central differences with one-sided ends, the fourth-difference dissipation
    with the maximal speed on nodes 2..n-3, and the last node copied from its
    neighbour.
    """
    A0, *A = assemble_A(background.state(+1), params)
    M = combine_A1tilde(A0, A, LiftDerivatives.flat(params.dim))
    a0 = np.diagonal(A0)
    alpha = np.max(np.abs(np.linalg.eigvalsh(M / np.sqrt(np.outer(a0, a0)))))
    h = grid.h1
    layout = UnknownLayout(params.dim)
    profile = np.zeros((layout.n, grid.n1 + 1))
    gauss = np.exp(-((grid.x1 - bump.center) / bump.width) ** 2)
    profile[layout.names().index(bump.component)] = bump.amplitude * gauss

    def rhs(V, t):
        dV = np.empty_like(V)
        dV[:, 1:-1] = V[:, 2:] - V[:, :-2]
        dV[:, 0] = -3.0 * V[:, 0] + 4.0 * V[:, 1] - V[:, 2]
        dV[:, -1] = 3.0 * V[:, -1] - 4.0 * V[:, -2] + V[:, -3]
        out = (float(time_bump(t, bump.duration)) * profile - M @ dV / (2.0 * h)) / a0[:, None]
        out[:, 2:-2] -= alpha / (8.0 * h) * (V[:, 4:] - 4.0 * V[:, 3:-1] + 6.0 * V[:, 2:-2]
                                             - 4.0 * V[:, 1:-3] + V[:, :-4])
        return out

    V = np.zeros((layout.n, grid.n1 + 1))
    for n in range(steps):
        t = n * dt
        stage = V + dt * rhs(V, t)
        stage[:, -1] = stage[:, -2]
        V = 0.5 * (V + stage + dt * rhs(stage, t + dt))
        V[:, -1] = V[:, -2]
    return V


class TestReferenceSolutions:
    """Self-convergence, a plane-wave reduction and reproducibility"""

    def test_self_convergence_order(self, background_2d):
        bump = InteriorBump(component="p", side=1, amplitude=0.1, center=4.0, width=1.0, duration=0.3)
        basics = [build_basic_state(background_2d, Grid(dim=2, n1=n1, n_tan=n_tan))
                  for n1, n_tan in ((32, 8), (64, 16), (128, 32))]
        finals = []
        for basic, steps in zip(basics, doubling_steps(basics, 0.3)):
            result = run(basic, SourceModel(basic.grid, [bump]), 0.3, track_boundary=False, steps=steps)
            finals.append(result.final_state.plus)
        coarse, middle, fine = finals
        e1 = np.max(np.abs(coarse - middle[:, ::2, ::2]))
        e2 = np.max(np.abs(middle - fine[:, ::2, ::2]))
        assert e2 > 0.0
        assert np.log2(e1 / e2) >= 1.8

    def test_plane_wave_matches_one_dimensional_scheme(self, background_2d, params_2d):
        grid = Grid(dim=2, n1=32, n_tan=4)
        bump = InteriorBump(component="p", side=1, amplitude=0.1, wavenumber=0, center=4.0,
                            width=0.5, duration=0.3)
        result = run(build_basic_state(background_2d, grid), SourceModel(grid, [bump]), 0.3,
                     track_boundary=False)
        reference = _plane_wave_reference(background_2d, params_2d, grid, bump, result.steps, result.dt)
        scale = np.max(np.abs(reference))
        assert scale > 1e-3
        plus = result.final_state.plus
        for j in range(grid.n_tan):
            np.testing.assert_allclose(plus[:, :, j], reference, rtol=0.0, atol=1e-10 * scale)
        assert np.max(np.abs(result.final_state.minus)) <= 1e-12 * scale

    def test_same_configuration_gives_identical_ledger(self, flat_basic, small_grid, tmp_path):
        sources = SourceModel(small_grid, [InteriorBump(amplitude=0.1, duration=0.1)],
                              [BoundaryBump(row=2, amplitude=0.05, duration=0.1)])
        paths = []
        for name in ("first", "second"):
            result = run(flat_basic, sources, 0.1, record_interval=2)
            paths.append(result.ledger.to_csv(tmp_path / f"{name}.csv"))
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestTraceProbe:
    """Numerical trace inequalities"""

    def test_random_fields_pass(self):
        report = trace_inequality_probe(Grid(dim=2, n1=32, n_tan=16, x_max=4.0), samples=5, seed=2)
        assert report.passed
        assert 0.0 < report.gaussian_ratio < 1.0
        assert report.to_dict()["passed"] is True

    @pytest.mark.parametrize("bandwidth", [-1, 8])
    def test_unresolved_bandwidth_rejected(self, bandwidth):
        with pytest.raises(ConfigurationError):
            trace_inequality_probe(Grid(dim=2, n1=8, n_tan=16), samples=1, bandwidth=bandwidth)


class TestTameProbe:
    """Solution over source norm ratios"""

    def test_ratio(self):
        norms = {"V": 1.0, "psi": 1.0, "f": 2.0, "g": 2.0}
        assert tame_ratio(norms) == pytest.approx(0.5)
        assert tame_ratio(norms, s=3, K=1.0) == pytest.approx(0.25)

    def test_single_grid_run(self, background_2d, small_grid):
        report = tame_estimate_probe(
            lambda g: build_basic_state(background_2d, g, norm_order=1),
            lambda g: SourceModel(g, [InteriorBump(amplitude=0.1, duration=0.05)]),
            [small_grid], 0.05,
        )
        assert report.labels == ["16"]
        assert report.ratios[0] > 0.0
        assert report.plateau is None
        assert not report.skipped

    def test_zero_sources_skipped(self, background_2d, small_grid):
        report = tame_estimate_probe(lambda g: build_basic_state(background_2d, g), SourceModel,
                                     [small_grid], 0.05)
        assert report.skipped
        assert report.ratios == []

    def test_invalid_inputs_rejected(self, background_2d, small_grid):
        with pytest.raises(ConfigurationError):
            tame_estimate_probe(lambda g: None, SourceModel, [small_grid], 0.05, s=2)
        with pytest.raises(ConfigurationError):
            tame_estimate_probe(lambda g: None, SourceModel, [], 0.05)

    def test_grid_family_reaches_plateau(self, background_2d):
        grids = [Grid(dim=2, n1=n, n_tan=8) for n in (16, 32, 64)]
        report = tame_estimate_probe(
            lambda g: build_basic_state(background_2d, g, norm_order=1),
            lambda g: SourceModel(g, [InteriorBump(amplitude=0.1, duration=0.1)],
                                  [BoundaryBump(row=2, amplitude=0.05, duration=0.1)]),
            grids, 0.15,
        )
        assert report.plateau is True
        assert report.band <= 3.0
        psi = [norms["psi"] for norms in report.norms]
        assert psi[2] <= 1.5 * psi[1]

"""Tests for the seeded identity suites.

Tests cover:
- Stability and jump suites passing with small sample counts
- Structure and eigenstructure suites with reduced sizes
- Linearity and reconstruction identities on a perturbed basic state
- Involution drift of runs from reference-map perturbations
- Suite ordering, and every record passing with the time-stepping suites
- The JSONL identity report
"""

import json

import numpy as np
import pytest

from app.models.grid import Grid
from app.services.verification import (
    IdentityRecord,
    SuiteSizes,
    default_basic_factory,
    hyperbolicity_suites,
    identity_suites,
    involution_initial_data,
    involution_suite,
    jump_suite,
    linearity_suite,
    reconstruction_suite,
    stability_suite,
    write_identity_report,
)


def _by_name(records):
    return {r.name: r for r in records}


class TestAlgebraicSuites:
    """Suites without grids"""

    def test_stability_suite(self, rng):
        records = _by_name(stability_suite(rng, exact_samples=50, float_samples=200))
        assert set(records) == {"exact_product_identity", "criteria_agree", "example_2d", "isotropic_threshold_3d"}
        assert records["exact_product_identity"].passed
        assert records["example_2d"].passed
        assert records["isotropic_threshold_3d"].passed

    def test_jump_suite(self, rng, params):
        records = _by_name(jump_suite(params, rng, samples=20))
        assert records["boundary_forms_agree"].passed
        assert records["background_rh_residual"].passed
        if params.dim == 2:
            assert records["gamma_law_background"].passed
            assert records["gamma_law_background"].details["s_minus"] == pytest.approx(-1.66355, abs=1e-5)
        else:
            assert "gamma_law_background" not in records

    def test_hyperbolicity_suites(self, params):
        records = hyperbolicity_suites(params, seed=3, sizes=SuiteSizes.reduced())
        names = [r.name for r in records]
        assert names == ["symmetry", "positive_definite_A0", "expanded_form_oracle",
                         "boundary_spectrum", "doubled_signature"]
        assert all(r.passed for r in records), [r.name for r in records if not r.passed]
        assert all(r.dim == params.dim for r in records)


class TestGridSuites:
    """Identities on one basic state"""

    def test_linearity(self, rng, perturbed_basic):
        records = linearity_suite(perturbed_basic, rng)
        assert all(r.passed for r in records)
        assert records[0].grid == "16x8"

    def test_reconstruction(self, rng, perturbed_basic):
        records = _by_name(reconstruction_suite(perturbed_basic, rng))
        assert records["good_unknown_round_trip"].passed


class TestInvolutions:
    """Source-free runs from reference-map perturbations of the background"""

    def test_initial_data_keeps_front_at_rest(self, params):
        factory = default_basic_factory(params, front_amplitude=0.0, bump_amplitude=0.0)
        basic = factory(Grid(params.dim, 16, 4))
        data = involution_initial_data(basic)
        np.testing.assert_array_equal(data.psi, 0.0)
        assert np.max(np.abs(data.plus)) > 0.0
        assert np.max(np.abs(data.minus)) > 0.0

    def test_drift_converges_at_second_order(self, params_2d):
        factory = default_basic_factory(params_2d, front_amplitude=0.0, bump_amplitude=0.0)
        record, = involution_suite(factory, [Grid(2, 32, 8), Grid(2, 64, 16)], final_time=0.2)
        assert {"inv1", "inv2"} <= set(record.details["resolved"])
        assert record.order >= 1.8
        assert record.passed
        for name in record.details["resolved"]:
            assert record.details["final"][name] < record.details["coarse"][name]

    def test_exact_background_does_not_drift(self, params):
        factory = default_basic_factory(params, front_amplitude=0.0, bump_amplitude=0.0)
        grids = [Grid(params.dim, 16, 4), Grid(params.dim, 32, 8)]
        record, = involution_suite(factory, grids, final_time=0.05, amplitude=0.0)
        assert record.residual == 0.0
        assert all(value == 0.0 for value in record.details["final"].values())
        assert record.details["resolved"] == []
        assert record.passed


class TestDrivers:
    """Suite order and the report file"""

    def test_identity_suites_without_solver(self, params_2d):
        sizes = SuiteSizes.reduced()
        records = identity_suites(params_2d, seed=1, sizes=sizes, include_solver=False)
        names = [r.name for r in records]
        assert names[:3] == ["symmetry", "positive_definite_A0", "expanded_form_oracle"]
        assert "rigidity_trivial_roots" in names
        assert "alinhac_identity" in names
        assert "cancellation" not in names
        assert "involution_drift" not in names

    def test_identity_suites_with_solver(self, params_2d):
        records = identity_suites(params_2d, seed=1, sizes=SuiteSizes.reduced())
        by_name = _by_name(records)
        assert {"rigidity_trivial_roots", "rigidity_entropy_witness", "linearization_slope",
                "alinhac_identity", "cancellation", "cancellation_zero_jump",
                "involution_drift"} <= set(by_name)
        assert all(r.passed for r in records), [r.name for r in records if not r.passed]
        for name in ("alinhac_identity", "cancellation", "involution_drift"):
            assert by_name[name].order >= 1.8
            assert by_name[name].grid == "32x8,64x16"

    def test_report_lines(self, tmp_path):
        records = [IdentityRecord("symmetry", 2, 0.0, True, samples=10),
                   IdentityRecord("alinhac_identity", 2, 1e-4, False, grid="16x8,32x16", order=1.5,
                                  details={"residuals": np.array([4e-4, 1e-4])})]
        path = write_identity_report(records, tmp_path / "identities.jsonl")
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert len(lines) == 2
        assert lines[0]["name"] == "symmetry"
        assert lines[0]["grid"] is None
        assert lines[1]["details"]["residuals"] == [4e-4, 1e-4]
        assert lines[1]["passed"] is False

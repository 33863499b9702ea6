"""Tests for the stability condition and classification sweeps.

Tests cover:
- Two- and three-dimensional verdicts, margins and estimate constants
- Equality cases reported as on the boundary and not satisfied
- Exact rational decisions and the C1 C3 = C2 C4 identity
- Agreement of the alternative three-dimensional criterion
- Sweep spec parsing, lexicographic ordering and the CSV table
"""

import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.errors import ConfigurationError
from app.services.stability import (
    NOT_SATISFIED,
    SATISFIED,
    SWEEP_COLUMNS,
    Stretches,
    Surd,
    SweepSpec,
    evaluate_condition,
    evaluate_stretches,
    exact_constants,
    exact_product_identity,
    exact_rearranged_2d,
    exact_satisfied,
    sweep,
    write_sweep_csv,
)


class TestStretches:
    """Validation of stretch inputs"""

    def test_lhs_and_jump(self):
        st = Stretches(2, 2.0, 1.5, 1.0)
        assert st.jump == pytest.approx(0.5)
        assert st.lhs == pytest.approx(0.25)

    @pytest.mark.parametrize("args", [
        (4, 1.0, 0.5, 1.0),
        (3, 1.0, 0.5, 1.0),
        (2, 1.0, -0.5, 1.0),
        (2, 1.0, 1.5, 1.0),
    ])
    def test_invalid_stretches_rejected(self, args):
        with pytest.raises(ConfigurationError):
            Stretches(*args)

    def test_from_background(self, background_2d):
        st = Stretches.from_background(background_2d)
        assert st == Stretches(2, 1.0, 0.5, 1.0)


class TestTwoDimensionalCondition:
    """[F11]/F11+ < F22^2/F11+^2"""

    def test_reference_example(self):
        verdict = evaluate_stretches(Stretches(2, 1.0, 0.5, 1.0))
        assert verdict.status == SATISFIED
        assert verdict.margin == pytest.approx(0.5)
        assert verdict.constants["C0"] == pytest.approx(0.5)
        assert verdict.criteria_agree

    def test_equality_is_not_satisfied(self):
        verdict = evaluate_stretches(Stretches(2, 1.0, 0.75, 0.5))
        assert verdict.on_boundary
        assert verdict.status == NOT_SATISFIED

    def test_large_jump_not_satisfied(self):
        verdict = evaluate_stretches(Stretches(2, 1.0, 0.2, 0.8))
        assert not verdict.satisfied
        assert verdict.margin == pytest.approx(0.64 - 0.8)

    def test_C0_uses_stretch_ratio(self):
        verdict = evaluate_stretches(Stretches(2, 2.0, 1.5, 1.0))
        assert verdict.constants["C0"] == pytest.approx(4.0 * 0.25)

    def test_background_verdict(self, background_2d):
        assert evaluate_condition(background_2d).to_dict()["status"] == SATISFIED


class TestThreeDimensionalCondition:
    """lhs < 1/C with the alternative C1..C4 criterion"""

    def test_isotropic_threshold(self):
        verdict = evaluate_stretches(Stretches(3, 1.0, 0.5, 1.0, 1.0))
        assert verdict.rhs == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)))
        assert verdict.status == NOT_SATISFIED
        assert verdict.criteria_agree

    def test_small_jump_satisfied(self):
        verdict = evaluate_stretches(Stretches(3, 1.0, 0.7, 1.0, 1.0))
        assert verdict.satisfied
        assert verdict.alternative is True
        assert verdict.constants["C1"] == pytest.approx(math.sqrt(2.0) * 0.3)

    def test_product_identity_in_floats(self):
        c = evaluate_stretches(Stretches(3, 1.3, 0.9, 0.7, 1.6)).constants
        assert c["C1"] * c["C3"] == pytest.approx(c["C2"] * c["C4"], rel=1e-14)

    def test_to_dict_carries_alternative(self):
        out = evaluate_stretches(Stretches(3, 1.0, 0.9, 1.2, 0.8)).to_dict()
        assert {"C", "C1", "C2", "C3", "C4", "alternative", "criteria_agree"} <= set(out)

    @pytest.mark.parametrize("f11m,f22,f33", [(0.9, 1.0, 1.0), (0.6, 1.5, 0.8), (0.95, 0.5, 2.0)])
    def test_criteria_agree(self, f11m, f22, f33):
        assert evaluate_stretches(Stretches(3, 1.0, f11m, f22, f33)).criteria_agree


class TestExactArithmetic:
    """Rational decisions of the condition"""

    def test_exact_product_identity(self):
        assert exact_product_identity(1, Fraction(1, 2), 2, 3)
        assert exact_product_identity(Fraction(7, 5), Fraction(1, 3), Fraction(2, 3), 5)

    def test_exact_two_dimensional(self):
        assert exact_satisfied(2, 1, Fraction(1, 2), 1)
        assert not exact_satisfied(2, 1, Fraction(3, 4), Fraction(1, 2))
        assert exact_rearranged_2d(1, Fraction(1, 2), 1)

    def test_exact_three_dimensional(self):
        assert not exact_satisfied(3, 1, Fraction(1, 2), 1, 1)
        assert exact_satisfied(3, 1, Fraction(7, 10), 1, 1)

    def test_surd_float_and_product(self):
        s = Surd(Fraction(1, 2), Fraction(8))
        assert float(s) == pytest.approx(math.sqrt(2.0))
        assert s * s == Surd(Fraction(1, 4), Fraction(64))

    def test_exact_constants_match_floats(self):
        exact = exact_constants(1, Fraction(1, 2), 1, 1)
        floats = evaluate_stretches(Stretches(3, 1.0, 0.5, 1.0, 1.0)).constants
        for name in ("C1", "C2", "C3", "C4"):
            assert float(exact[name]) == pytest.approx(floats[name], rel=1e-15)


class TestSweep:
    """Tensor-grid sweeps over stretch ratios"""

    @pytest.fixture
    def spec(self):
        return SweepSpec.from_dict({
            "dim": 2,
            "f11m_over_f11p": {"start": 0.1, "stop": 0.9, "num": 5},
            "f22_over_f11p": [1.0, 0.5],
        })

    def test_lexicographic_order(self, spec):
        rows = sweep(spec)
        assert len(rows) == 10
        assert (rows[0].f11m, rows[0].f22) == pytest.approx((0.1, 0.5))
        assert (rows[1].f11m, rows[1].f22) == pytest.approx((0.1, 1.0))
        assert rows[-1].f11m == pytest.approx(0.9)

    def test_threads_keep_order(self, spec):
        serial = [r.to_row() for r in sweep(spec)]
        threaded = [r.to_row() for r in sweep(spec, threads=3)]
        assert serial == threaded

    def test_csv_table(self, spec, tmp_path):
        path = write_sweep_csv(sweep(spec), tmp_path / "sweep.csv")
        with open(path, newline="", encoding="utf-8") as f:
            table = list(csv.reader(f))
        assert table[0] == SWEEP_COLUMNS
        assert len(table) == 11
        assert table[1][3] == ""
        assert table[-1][7] in ("true", "false")

    def test_three_dimensional_scalar_axes(self):
        spec = SweepSpec.from_dict({"dim": 3, "f11m_over_f11p": 0.5, "f22_over_f11p": 1.0,
                                    "f33_over_f11p": [1.0, 2.0]})
        rows = sweep(spec)
        assert [r.f33 for r in rows] == [1.0, 2.0]
        assert rows[0].verdict.status == NOT_SATISFIED

    def test_from_yaml(self, tmp_path):
        path = tmp_path / "sweep.yaml"
        path.write_text("dim: 2\nf11m_over_f11p: [0.5]\nf22_over_f11p: [1.0]\n", encoding="utf-8")
        spec = SweepSpec.from_yaml(path)
        np.testing.assert_array_equal(spec.f11m, [0.5])

    @pytest.mark.parametrize("data", [
        {"dim": 2, "f11m_over_f11p": [0.5], "f22_over_f11p": [1.0], "f44": 1.0},
        {"dim": 2, "f11m_over_f11p": [1.0], "f22_over_f11p": [1.0]},
        {"dim": 2, "f11m_over_f11p": {"start": 0.1, "stop": 0.5}, "f22_over_f11p": [1.0]},
        {"dim": 2, "f11m_over_f11p": [0.5]},
        {"dim": 3, "f11m_over_f11p": [0.5], "f22_over_f11p": [1.0]},
        {"dim": 2, "f11m_over_f11p": [0.5], "f22_over_f11p": [-1.0]},
    ])
    def test_invalid_specs_rejected(self, data):
        with pytest.raises(ConfigurationError):
            SweepSpec.from_dict(data)

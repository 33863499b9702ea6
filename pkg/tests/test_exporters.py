"""Tests for export functionality (CSV, JSON, snapshots, PDF).

Tests cover:
- CSV tables with repr floats and lowercase booleans
- Ledger and summary CSV export
- JSON and JSON Lines payloads, including non-finite floats
- Flat binary snapshots with their sidecar
- PDF report generation when reportlab is available
- Path handling and directory creation
"""

import csv
import json
import tempfile
from pathlib import Path

import numpy as np
import pytest

from app.services.exporters import ResultsExporter, to_jsonable
from app.services.solver import InteriorBump, SourceModel, run
from app.services.stability import SweepSpec, sweep


@pytest.fixture
def short_run(flat_basic, small_grid):
    """A few steps driven by an interior pressure bump"""
    sources = SourceModel(small_grid, [InteriorBump(amplitude=0.1, duration=0.05)])
    return run(flat_basic, sources, 0.05, record_interval=1)


class TestCSVTables:
    """Plain tables"""

    def test_cells_are_formatted(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = ResultsExporter.export_table_to_csv(
                ["name", "value", "flag", "count"],
                [["a", 0.1, True, np.int64(3)], ["b", np.float64(1.0 / 3.0), np.bool_(False), 4]],
                Path(tmpdir) / "table.csv",
            )
            with open(path, newline="", encoding="utf-8") as f:
                rows = list(csv.reader(f))

        assert rows[0] == ["name", "value", "flag", "count"]
        assert rows[1] == ["a", "0.1", "true", "3"]
        assert float(rows[2][1]) == 1.0 / 3.0
        assert rows[2][2] == "false"

    def test_creates_parent_directories(self, tmp_path):
        path = ResultsExporter.export_table_to_csv(["x"], [[1]], tmp_path / "nested" / "dir" / "t.csv")
        assert path.exists()

    def test_unix_line_endings(self, tmp_path):
        path = ResultsExporter.export_table_to_csv(["x"], [[1], [2]], tmp_path / "t.csv")
        assert path.read_bytes() == b"x\n1\n2\n"

    def test_summary_rows_sorted(self, tmp_path):
        path = ResultsExporter.export_summary_to_csv({"steps": 4, "dt": 0.5}, tmp_path / "summary.csv")
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert rows == [["Metric", "Value"], ["dt", "0.5"], ["steps", "4"]]


class TestLedgerExport:
    """Energy ledger CSV"""

    def test_ledger_columns_and_rows(self, short_run, tmp_path):
        ledger = short_run.ledger
        path = ledger.to_csv(tmp_path / "ledger.csv")
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ledger.columns
        assert len(rows) == len(ledger.rows) + 1
        assert float(rows[-1][ledger.columns.index("t")]) == pytest.approx(short_run.final_state.t)


class TestJSON:
    """JSON payloads"""

    def test_numpy_values_converted(self):
        out = to_jsonable({"a": np.arange(3), "b": np.float64(0.5), "c": (np.bool_(True), np.int32(2))})
        assert out == {"a": [0, 1, 2], "b": 0.5, "c": [True, 2]}

    def test_non_finite_floats_as_strings(self):
        assert to_jsonable([float("nan"), np.inf, -np.inf]) == ["nan", "inf", "-inf"]

    def test_sorted_indented_with_newline(self, tmp_path):
        path = ResultsExporter.export_json({"b": 1, "a": [1.5]}, tmp_path / "out.json")
        text = path.read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1.5], "b": 1}

    def test_jsonl_one_record_per_line(self, tmp_path):
        path = ResultsExporter.export_jsonl([{"trial": 0}, {"trial": 1, "root": np.zeros(2)}],
                                            tmp_path / "trials.jsonl")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert [json.loads(line) for line in lines] == [{"trial": 0}, {"trial": 1, "root": [0.0, 0.0]}]


class TestSnapshots:
    """Flat binary field dumps"""

    def test_field_snapshot(self, rng, tmp_path):
        field = rng.normal(size=(8, 5, 4))
        path = ResultsExporter.export_snapshot(field, tmp_path / "snap", 0.25, side=-1)
        assert path.name == "snap.bin"
        assert path.stat().st_size == field.size * 8
        data, meta = ResultsExporter.read_snapshot(path)
        np.testing.assert_array_equal(data, field)
        assert meta["axes"] == ["component", "x1", "x2"]
        assert meta["dtype"] == "<f8"
        assert meta["endianness"] == "little"
        assert meta["side"] == -1

    def test_boundary_snapshot_axes(self, tmp_path):
        path = ResultsExporter.export_snapshot(np.ones(6), tmp_path / "psi", 1.0)
        _, meta = ResultsExporter.read_snapshot(path)
        assert meta["axes"] == ["x2"]
        assert meta["side"] is None
        assert meta["shape"] == [6]


class TestPDFExportConditional:
    """PDF reports if reportlab is available"""

    def test_run_report_creates_file(self, short_run, tmp_path):
        pytest.importorskip("reportlab")
        from app.services.exporters.pdf_report_generator import PDFReportGenerator

        output_path = tmp_path / "run.pdf"
        PDFReportGenerator().generate_run_report(short_run.ledger, short_run.summary(), output_path,
                                                 include_charts=False)
        assert output_path.exists()
        assert output_path.read_bytes().startswith(b"%PDF")

    def test_sweep_report_with_charts(self, tmp_path):
        pytest.importorskip("reportlab")
        pytest.importorskip("matplotlib")
        from app.services.exporters.pdf_report_generator import PDFReportGenerator

        rows = sweep(SweepSpec.from_dict({"dim": 2, "f11m_over_f11p": [0.3, 0.6], "f22_over_f11p": [0.5, 1.0]}))
        output_path = PDFReportGenerator().generate_sweep_report(rows, tmp_path / "sweep.pdf")
        assert output_path.stat().st_size > 0

"""Export services for run results.

CSV ledgers and tables, JSON/JSONL payloads, flat binary field snapshots and
optional PDF reports.
"""

from app.services.exporters.results_exporter import ResultsExporter, to_jsonable

__all__ = ["ResultsExporter", "to_jsonable"]

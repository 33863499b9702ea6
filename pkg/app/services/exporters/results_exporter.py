"""Export ledgers, tables, JSON payloads and field snapshots"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SNAPSHOT_DTYPE = "<f8"


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and nested containers into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    return value


class ResultsExporter:
    """Export run results to CSV, JSON and flat binary files"""

    @staticmethod
    def export_table_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], output_path: PathLike) -> Path:
        """Write a header and rows; floats use repr so the file is reproducible bit for bit."""
        csv_path = Path(output_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)

        with open(csv_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(list(header))
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
        logger.debug(f"Table written to {csv_path}")
        return csv_path

    @staticmethod
    def export_ledger_to_csv(ledger, output_path: PathLike) -> Path:
        """Export an EnergyLedger with its fixed column order"""
        return ResultsExporter.export_table_to_csv(ledger.columns, ledger.table(), output_path)

    @staticmethod
    def export_json(payload: Any, output_path: PathLike) -> Path:
        json_path = Path(output_path)
        json_path.parent.mkdir(parents=True, exist_ok=True)
        with open(json_path, 'w', encoding='utf-8') as f:
            json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
            f.write('\n')
        return json_path

    @staticmethod
    def export_jsonl(records: Iterable[Dict], output_path: PathLike) -> Path:
        """One JSON object per line"""
        jsonl_path = Path(output_path)
        jsonl_path.parent.mkdir(parents=True, exist_ok=True)
        with open(jsonl_path, 'w', encoding='utf-8') as f:
            for record in records:
                f.write(json.dumps(to_jsonable(record), sort_keys=True) + '\n')
        return jsonl_path

    @staticmethod
    def export_snapshot(array: np.ndarray, output_stem: PathLike, t: float, side: Optional[int] = None) -> Path:
        """Write <stem>.bin (little-endian float64, C order) and a <stem>.json sidecar.

        Field arrays are component-first with x_1 the leading spatial axis.

        Returns:
            Path of the .bin file
        """
        stem = Path(output_stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        data = np.ascontiguousarray(array, dtype=SNAPSHOT_DTYPE)
        bin_path = stem.with_suffix('.bin')
        data.tofile(bin_path)

        spatial = ['x1', 'x2', 'x3']
        if side is None:
            axes = spatial[1:data.ndim + 1]
        else:
            axes = ['component'] + spatial[:data.ndim - 1]
        meta = {
            'shape': list(data.shape),
            'dtype': SNAPSHOT_DTYPE,
            'order': 'C',
            'axes': axes,
            'endianness': 'little',
            't': float(t),
            'side': side,
        }
        ResultsExporter.export_json(meta, stem.with_suffix('.json'))
        logger.debug(f"Snapshot {bin_path.name} written, shape {data.shape}")
        return bin_path

    @staticmethod
    def read_snapshot(bin_path: PathLike) -> Tuple[np.ndarray, Dict]:
        """Read a snapshot back using its sidecar"""
        bin_path = Path(bin_path)
        with open(bin_path.with_suffix('.json'), 'r', encoding='utf-8') as f:
            meta = json.load(f)
        data = np.fromfile(bin_path, dtype=meta['dtype']).reshape(meta['shape'])
        return data, meta

    @staticmethod
    def export_summary_to_csv(summary: Dict[str, Any], output_path: PathLike) -> Path:
        """Export a flat summary as Metric,Value rows"""
        rows: List[List[Any]] = [[key, value] for key, value in sorted(summary.items())]
        return ResultsExporter.export_table_to_csv(['Metric', 'Value'], rows, output_path)

"""
Result tables and their writers.

Every table carries a metadata block (config echo, software version, schema
version, tolerances). Writers are deterministic: floats are printed with 17
significant digits in CSV and as Python's shortest round-trip repr in JSON,
metadata keys are sorted, and nothing time-dependent is written.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, TextIO

from damped_kernel import __version__

FORMAT_VERSION = "1.0"

# Column layout version per table; bump when columns change
SCHEMA_VERSIONS: Dict[str, int] = {
    "kernel": 1,
    "converge": 1,
    "evolve": 1,
    "compare": 1,
    "check": 1,
}


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats and complex numbers by JSON-safe values."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, complex):
        return [_jsonable(value.real), _jsonable(value.imag)]
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


def format_cell(value: Any) -> str:
    """CSV text of one cell: 17 significant digits for floats, '' for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass
class ResultTable:
    """Rectangular table of cells plus a metadata block."""

    name: str
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("column names must be unique")
        for row in self.rows:
            self._check_row(row)

    def _check_row(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")

    def add_row(self, row: Sequence[Any]) -> None:
        self._check_row(row)
        self.rows.append(tuple(row))

    def column(self, name: str) -> List[Any]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def full_metadata(self) -> Dict[str, Any]:
        meta = {
            "format_version": FORMAT_VERSION,
            "schema": {"table": self.name, "version": SCHEMA_VERSIONS.get(self.name, 1)},
            "software": {"name": "damped-kernel", "version": __version__},
        }
        meta.update(self.metadata)
        return _jsonable(meta)

    def to_csv(self, stream: TextIO) -> None:
        """RFC-4180 CSV preceded by '#' lines holding the metadata as JSON."""
        meta = json.dumps(self.full_metadata(), sort_keys=True)
        stream.write(f"# damped-kernel {self.name} table\r\n")
        stream.write(f"# {meta}\r\n")
        writer = csv.writer(stream, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])

    def to_gnuplot(self, stream: TextIO) -> None:
        """Whitespace-separated columns; header and metadata as comments."""
        meta = json.dumps(self.full_metadata(), sort_keys=True)
        stream.write(f"# damped-kernel {self.name} table\n")
        stream.write(f"# {meta}\n")
        stream.write("# " + " ".join(self.columns) + "\n")
        for row in self.rows:
            cells = [format_cell(v) or "NaN" for v in row]
            stream.write(" ".join(cells) + "\n")

    def to_json(self, stream: TextIO) -> None:
        """Object with 'metadata', 'columns' and 'rows' (one object per row)."""
        payload = {
            "metadata": self.full_metadata(),
            "columns": list(self.columns),
            "rows": [
                {col: _jsonable(v) for col, v in zip(self.columns, row)}
                for row in self.rows
            ],
        }
        json.dump(payload, stream, indent=2, sort_keys=False, allow_nan=False)
        stream.write("\n")

    def render(self, fmt: str = "csv", gnuplot: bool = False) -> str:
        buffer = io.StringIO(newline="")
        if gnuplot:
            self.to_gnuplot(buffer)
        elif fmt == "json":
            self.to_json(buffer)
        elif fmt == "csv":
            self.to_csv(buffer)
        else:
            raise ValueError(f"unknown output format {fmt!r}")
        return buffer.getvalue()

    def write(self, path: Path, fmt: str = "csv", gnuplot: bool = False) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(self.render(fmt, gnuplot))
        return path

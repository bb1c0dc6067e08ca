"""Plot-ready output tables: RFC 4180 CSV and JSON."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

__all__ = ["OutputTable", "format_cell"]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(format_cell(v) for v in value) + "]"
    return str(value)


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    return value


@dataclass
class OutputTable:
    header: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.header = list(self.header)
        self.rows = [list(r) for r in self.rows]
        width = len(self.header)
        for r in self.rows:
            if len(r) != width:
                raise ValueError(f"row has {len(r)} cells, header has {width}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.header)
        for r in self.rows:
            writer.writerow([format_cell(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "header": self.header,
            "rows": [[_jsonable(v) for v in r] for r in self.rows],
            "metadata": _jsonable_dict(self.metadata),
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    @classmethod
    def from_json(cls, text: str) -> "OutputTable":
        doc = json.loads(text)
        return cls(doc["header"], doc["rows"], doc.get("metadata", {}))


def _jsonable_dict(d):
    return {k: (_jsonable_dict(v) if isinstance(v, dict) else _jsonable(v)) for k, v in d.items()}

"""Deterministic rendering of relations as aligned text, CSV, or JSON lines.

Rows are always emitted in row-key order.  Columns follow the schema's field
order; fields that appear only in some rows of a heterogeneous result are
appended after the schema columns, sorted by name.  Table and CSV output pad
missing fields with "" and show the explicit null as ``null_text``; JSON
output emits each row's record verbatim (null as JSON null) using the same
canonical serialization the table files use.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from sgdb.model import Relation
from sgdb.storage import canonical_record_bytes

FORMATS = ("table", "csv", "json")


@dataclass(frozen=True)
class RenderSpec:
    format: str = "table"
    null_text: str = "NULL"


def columns_of(rel: Relation) -> list[str]:
    """Schema fields first, then any extra row fields in sorted order."""
    cols = list(rel.schema.fields)
    known = set(cols)
    extras = {f for row in rel.rows.values() for f in row if f not in known}
    return cols + sorted(extras)


def render(rel: Relation, spec: RenderSpec = RenderSpec()) -> str:
    if spec.format == "json":
        return "".join(
            canonical_record_bytes(rel.rows[key]).decode("utf-8") + "\n"
            for key in sorted(rel.rows)
        )
    cols = columns_of(rel)
    grid = []
    for key in sorted(rel.rows):
        row = rel.rows[key]
        cells = []
        for c in cols:
            v = row.get(c, "")
            cells.append(spec.null_text if v is None else v)
        grid.append(cells)
    if spec.format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(cols)
        writer.writerows(grid)
        return out.getvalue()
    if spec.format != "table":
        raise ValueError(f"unknown format {spec.format!r}")
    widths = [len(c) for c in cols]
    for cells in grid:
        for i, cell in enumerate(cells):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(c.ljust(widths[i]) for i, c in enumerate(cols)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for cells in grid:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip())
    lines.append(f"({len(grid)} row{'s' if len(grid) != 1 else ''})")
    return "\n".join(lines) + "\n"

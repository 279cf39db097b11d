"""CSV import/export for base tables.

Import reads the header as the schema (in column order), requires the named
primary-key column, and rejects duplicated key values.  Export writes the
schema columns in order with rows sorted by key, so identical tables always
produce identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

from sgdb.errors import CsvFormatError, DuplicateKeyError, MissingColumnError
from sgdb.model import Schema
from sgdb.storage import Database


def import_csv(db: Database, table: str, csv_path: str | Path, pk: str) -> int:
    """Create ``table`` from a headed CSV file; returns the number of rows loaded."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{csv_path}: empty file, expected a header row") from None
        if pk not in header:
            raise MissingColumnError(f"{csv_path}: no {pk!r} column in header {header}")
        rows = []
        seen: set[str] = set()
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != len(header):
                raise CsvFormatError(
                    f"{csv_path}:{lineno}: row has {len(cells)} cells, header has {len(header)}"
                )
            record = dict(zip(header, cells))
            key = record[pk]
            if not key:
                raise CsvFormatError(f"{csv_path}:{lineno}: empty primary-key value")
            if key in seen:
                raise DuplicateKeyError(f"{csv_path}:{lineno}: duplicate primary key {key!r}")
            seen.add(key)
            rows.append(record)
    handle = db.create(table, Schema(pk, tuple(header)), sync=False)
    try:
        for record in rows:
            handle.put_record(record)
    finally:
        handle.close()
    return len(rows)


def export_csv(db: Database, table: str, csv_path: str | Path) -> int:
    """Write ``table`` to a CSV file; returns the number of rows written."""
    rel = db.scan(table)
    cols = list(rel.schema.fields)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for key in sorted(rel.rows):
            row = rel.rows[key]
            writer.writerow([row.get(c) or "" for c in cols])
    return len(rel.rows)

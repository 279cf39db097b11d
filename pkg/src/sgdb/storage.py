"""One-table, one-file persistence.

Each relation lives in its own append-only log file:

    magic "SGDB" + version 0x01
    record := [op:1][keylen:u32 LE][key][vallen:u32 LE (PUT/META only)][value][crc32:u32 LE]

op is META=0x00, PUT=0x01 or DEL=0x02; the CRC covers op, lengths, key and
value.  The META record (key = the single byte 0x00) carries the schema as
JSON and is written first.  Values are canonical JSON: keys sorted by code
point, UTF-8, no insignificant whitespace, null for the explicit null value.

Opening replays the log into a key -> offset index (last write wins, DEL
removes).  A torn final record — a crash artifact — is truncated away on
open; a checksum failure on a complete record is corruption and is reported.
A database is simply a directory of ``<table>.sgt`` files.
"""

from __future__ import annotations

import fcntl
import json
import os
import re
import struct
import zlib
from pathlib import Path

from sgdb.errors import (
    CorruptFileError,
    SchemaError,
    SchemaMismatchError,
    TableExistsError,
    TableLockedError,
    UnknownTableError,
    UseAfterCloseError,
)
from sgdb.model import Relation, Schema, TupleRecord, create_relation

MAGIC = b"SGDB"
VERSION = 0x01
OP_META = 0x00
OP_PUT = 0x01
OP_DEL = 0x02
META_KEY = b"\x00"

_U32 = struct.Struct("<I")

TABLE_SUFFIX = ".sgt"
_TABLE_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def canonical_record_bytes(record: TupleRecord) -> bytes:
    """Byte-identical serialization for any record with the same contents."""
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _schema_bytes(schema: Schema) -> bytes:
    payload = {"primary_key": schema.primary_key, "fields": list(schema.fields)}
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _schema_from_bytes(raw: bytes) -> Schema:
    try:
        payload = json.loads(raw.decode("utf-8"))
        return Schema(primary_key=payload["primary_key"], fields=tuple(payload["fields"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptFileError(f"unreadable schema record: {exc}") from exc


def _encode(op: int, key: bytes, value: bytes | None) -> bytes:
    buf = bytes([op]) + _U32.pack(len(key)) + key
    if value is not None:
        buf += _U32.pack(len(value)) + value
    return buf + _U32.pack(zlib.crc32(buf) & 0xFFFFFFFF)


class _TornRecord(Exception):
    """The file ends in the middle of a record."""


class TableFile:
    """Handle on one table's log file; the single writer for that table.

    An exclusive lock is taken at open and held until close, so two handles
    on the same file cannot coexist.  ``sync=False`` defers fsync to close,
    which is faster for bulk loads but trades away crash durability for the
    unsynced suffix (replay still never yields a half-written record).
    """

    def __init__(self, path: str | Path, schema: Schema | None = None, *, sync: bool = True):
        self.path = Path(path)
        self.sync = sync
        self._closed = False
        self.live_index: dict[str, int] = {}
        creating = not self.path.exists()
        if creating:
            if schema is None:
                raise SchemaError(f"{self.path}: creating a table requires a schema")
            # Validate through the same rules as an in-memory relation.
            create_relation(schema.primary_key, list(schema.fields))
            self._fh = open(self.path, "x+b")
            self._lock()
            self.schema = Schema(schema.primary_key, tuple(schema.fields))
            self._fh.write(MAGIC + bytes([VERSION]))
            self._fh.write(_encode(OP_META, META_KEY, _schema_bytes(self.schema)))
            self._flush()
        else:
            self._fh = open(self.path, "r+b")
            self._lock()
            self.schema = self._replay()
            if schema is not None and (
                schema.primary_key != self.schema.primary_key or tuple(schema.fields) != self.schema.fields
            ):
                self._fh.close()
                raise SchemaMismatchError(
                    f"{self.path}: stored schema {self.schema} != given {schema}"
                )

    def _lock(self) -> None:
        try:
            fcntl.flock(self._fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self._fh.close()
            raise TableLockedError(f"{self.path} is locked by another writer") from None

    def _flush(self) -> None:
        self._fh.flush()
        if self.sync:
            os.fsync(self._fh.fileno())

    def _read_exact(self, n: int) -> bytes:
        data = self._fh.read(n)
        if len(data) != n:
            raise _TornRecord()
        return data

    def _read_record(self):
        """Read one record at the current offset; (op, key, value) or None at EOF."""
        head = self._fh.read(1)
        if not head:
            return None
        op = head[0]
        if op not in (OP_META, OP_PUT, OP_DEL):
            raise CorruptFileError(f"{self.path}: invalid record tag 0x{op:02x}")
        (keylen,) = _U32.unpack(self._read_exact(4))
        key = self._read_exact(keylen)
        value = None
        if op != OP_DEL:
            (vallen,) = _U32.unpack(self._read_exact(4))
            value = self._read_exact(vallen)
        body = bytes([op]) + _U32.pack(keylen) + key
        if value is not None:
            body += _U32.pack(len(value)) + value
        (crc,) = _U32.unpack(self._read_exact(4))
        if crc != zlib.crc32(body) & 0xFFFFFFFF:
            raise CorruptFileError(f"{self.path}: checksum mismatch")
        return op, key, value

    def _replay(self) -> Schema:
        self._fh.seek(0)
        header = self._fh.read(5)
        if len(header) != 5 or header[:4] != MAGIC or header[4] != VERSION:
            raise CorruptFileError(f"{self.path}: bad magic")
        schema: Schema | None = None
        while True:
            offset = self._fh.tell()
            try:
                record = self._read_record()
            except _TornRecord:
                # Crash artifact: drop the incomplete tail, keep the good
                # prefix.  A truncated write can never yield a complete
                # record with a bad checksum, so those stay CorruptFileError.
                self._fh.seek(offset)
                self._fh.truncate(offset)
                self._flush()
                break
            if record is None:
                break
            op, key, value = record
            if op == OP_META:
                schema = _schema_from_bytes(value or b"")
            elif op == OP_PUT:
                self.live_index[key.decode("utf-8")] = offset
            else:
                self.live_index.pop(key.decode("utf-8"), None)
        if schema is None:
            raise CorruptFileError(f"{self.path}: no schema record")
        self._fh.seek(0, os.SEEK_END)
        return schema

    def _check_open(self) -> None:
        if self._closed:
            raise UseAfterCloseError(f"{self.path} is closed")

    def _validate(self, record: TupleRecord) -> str:
        pk = self.schema.primary_key
        if pk not in record:
            raise SchemaError(f"record is missing the primary-key field {pk!r}")
        for f, v in record.items():
            if f not in self.schema.fields:
                raise SchemaError(f"unknown field {f!r} for table {self.path.stem!r}")
            if not isinstance(v, str):
                raise SchemaError(f"field {f!r} must hold a string")
        key = record[pk]
        if not key:
            raise SchemaError("primary-key value must be a non-empty string")
        return key

    def put_record(self, record: TupleRecord) -> None:
        """Append a PUT and update the index; replaces any prior version of the key."""
        self._check_open()
        key = self._validate(record)
        self._fh.seek(0, os.SEEK_END)
        offset = self._fh.tell()
        self._fh.write(_encode(OP_PUT, key.encode("utf-8"), canonical_record_bytes(record)))
        self._flush()
        self.live_index[key] = offset

    def delete_record(self, key: str) -> None:
        """Append a DEL; deleting an absent key still logs the DEL (tolerant)."""
        self._check_open()
        self._fh.seek(0, os.SEEK_END)
        self._fh.write(_encode(OP_DEL, key.encode("utf-8"), None))
        self._flush()
        self.live_index.pop(key, None)

    def _record_at(self, offset: int) -> TupleRecord:
        self._fh.seek(offset)
        record = self._read_record()
        assert record is not None and record[0] == OP_PUT
        value = json.loads((record[2] or b"").decode("utf-8"))
        if not isinstance(value, dict) or any(
            not (isinstance(v, str) or v is None) for v in value.values()
        ):
            raise CorruptFileError(f"{self.path}: record payload is not a field map")
        return value

    def scan_all(self) -> Relation:
        """Materialize the live rows as an in-memory relation."""
        self._check_open()
        rows = {key: self._record_at(off) for key, off in self.live_index.items()}
        self._fh.seek(0, os.SEEK_END)
        return Relation(self.schema, rows)

    def compact(self) -> None:
        """Rewrite the file as META plus one PUT per live key, in key order.

        Writes to a temp file and renames over the original, so a failure
        leaves the table untouched.
        """
        self._check_open()
        rows = {key: self._record_at(off) for key, off in self.live_index.items()}
        tmp = self.path.with_name(self.path.name + ".compact")
        with open(tmp, "wb") as out:
            out.write(MAGIC + bytes([VERSION]))
            out.write(_encode(OP_META, META_KEY, _schema_bytes(self.schema)))
            for key in sorted(rows):
                out.write(_encode(OP_PUT, key.encode("utf-8"), canonical_record_bytes(rows[key])))
            out.flush()
            os.fsync(out.fileno())
        os.replace(tmp, self.path)
        self._fh.close()
        self._fh = open(self.path, "r+b")
        self._lock()
        self.live_index.clear()
        self._replay()

    def close(self) -> None:
        """Flush and release the handle; closing twice is a no-op."""
        if self._closed:
            return
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._fh.close()
        self._closed = True

    def __enter__(self) -> "TableFile":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_table(path: str | Path, schema: Schema | None = None, *, sync: bool = True) -> TableFile:
    """Open (or create, when a schema is given) the table file at ``path``."""
    return TableFile(path, schema, sync=sync)


class Database:
    """A directory of table files; tables are discovered by listing it."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        if not _TABLE_NAME_RE.match(name):
            raise SchemaError(f"invalid table name {name!r} (letters, digits and _ only)")
        return self.root / f"{name}{TABLE_SUFFIX}"

    def list_tables(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob(f"*{TABLE_SUFFIX}"))

    def exists(self, name: str) -> bool:
        return self._path(name).exists()

    def create(self, name: str, schema: Schema, *, sync: bool = True) -> TableFile:
        path = self._path(name)
        if path.exists():
            raise TableExistsError(f"table {name!r} already exists")
        return TableFile(path, schema, sync=sync)

    def open(self, name: str, *, sync: bool = True) -> TableFile:
        path = self._path(name)
        if not path.exists():
            raise UnknownTableError(f"no table named {name!r}")
        return TableFile(path, sync=sync)

    def drop(self, name: str) -> None:
        path = self._path(name)
        if not path.exists():
            raise UnknownTableError(f"no table named {name!r}")
        path.unlink()

    def scan(self, name: str) -> Relation:
        with self.open(name) as table:
            return table.scan_all()

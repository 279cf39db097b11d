"""sgdb: an embedded relational engine over a star-graph data model.

Each tuple is a star graph — the primary-key value at the center, one
labeled edge per field — and a relation is a keyed set of such tuples.
The package provides the relational operators over that model, one-file-
per-table persistence, a pipeline query language with a REPL, CSV
import/export, and a built-in differential-testing oracle.
"""

from sgdb.errors import (
    CorruptFileError,
    CsvFormatError,
    DuplicateKeyError,
    FieldCollisionError,
    KeyCollisionError,
    KeyNotFoundError,
    LexError,
    MissingColumnError,
    MissingJoinKeyError,
    NoCommonFieldError,
    NotJoinableError,
    ParseError,
    SchemaError,
    SchemaMismatchError,
    SgdbError,
    StorageError,
    TableExistsError,
    TableLockedError,
    UnknownTableError,
    UseAfterCloseError,
)
from sgdb.model import (
    Relation,
    Schema,
    StarGraphView,
    as_star_graph,
    create_relation,
    delete_tuple,
    get_tuple,
    insert_tuple,
    relation_equal,
    relation_from_mapping,
)
from sgdb.ops import (
    STAR,
    Condition,
    cartesian,
    flatten_record,
    inner_join,
    left_join,
    natural_join,
    outer_join,
    project,
    rename,
    right_join,
    select,
)
from sgdb.storage import Database, TableFile, open_table

__all__ = [
    "CorruptFileError",
    "CsvFormatError",
    "Condition",
    "Database",
    "DuplicateKeyError",
    "FieldCollisionError",
    "KeyCollisionError",
    "KeyNotFoundError",
    "LexError",
    "MissingColumnError",
    "MissingJoinKeyError",
    "NoCommonFieldError",
    "NotJoinableError",
    "ParseError",
    "Relation",
    "STAR",
    "Schema",
    "SchemaError",
    "SchemaMismatchError",
    "SgdbError",
    "StarGraphView",
    "StorageError",
    "TableExistsError",
    "TableFile",
    "TableLockedError",
    "UnknownTableError",
    "UseAfterCloseError",
    "as_star_graph",
    "cartesian",
    "create_relation",
    "delete_tuple",
    "flatten_record",
    "get_tuple",
    "inner_join",
    "insert_tuple",
    "left_join",
    "natural_join",
    "open_table",
    "outer_join",
    "project",
    "relation_equal",
    "relation_from_mapping",
    "rename",
    "right_join",
    "select",
]

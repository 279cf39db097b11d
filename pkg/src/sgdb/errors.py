"""Exception hierarchy shared by every sgdb module."""


class SgdbError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SgdbError):
    """Schema definition or tuple/schema mismatch (bad field set, missing pk, ...)."""


class KeyNotFoundError(SgdbError):
    """A row key was looked up in a relation that does not contain it."""


class FieldCollisionError(SgdbError):
    """rename would overwrite a field that already exists in some row."""


class KeyCollisionError(SgdbError):
    """Two distinct inputs map to the same output key (flatten path or result row key)."""


class MissingJoinKeyError(SgdbError):
    """A join was requested with an absent or empty joining-field name."""


class NoCommonFieldError(SgdbError):
    """Natural join over relations whose field-name sets do not intersect."""


class NotJoinableError(SgdbError):
    """Natural join where the shared fields do not include the right relation's primary key."""


class StorageError(SgdbError):
    """Base class for table-file problems."""


class CorruptFileError(StorageError):
    """Bad magic, bad mid-file checksum, or an unreadable metadata record."""


class SchemaMismatchError(StorageError):
    """A table file's stored schema differs from the schema supplied at open."""


class TableLockedError(StorageError):
    """Another process holds the exclusive writer lock on the table file."""


class UseAfterCloseError(StorageError):
    """Operation attempted on a closed table handle."""


class UnknownTableError(SgdbError):
    """A statement referenced a table that does not exist in the database directory."""


class TableExistsError(SgdbError):
    """create/import targeted a table name that is already in use."""


class DuplicateKeyError(SgdbError):
    """CSV import found two rows with the same primary-key value."""


class MissingColumnError(SgdbError):
    """CSV import was given a primary-key column that is not in the header."""


class CsvFormatError(SgdbError):
    """A CSV data row does not line up with the header."""


class LexError(SgdbError):
    """Tokenizer failure; carries a 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class ParseError(SgdbError):
    """Parser failure; carries a 1-based position and the token kinds/texts expected there."""

    def __init__(self, message: str, line: int, col: int, expected: frozenset[str]):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col
        self.expected = expected

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import golden_data as gd  # noqa: E402

from sgdb.model import Relation, relation_from_mapping  # noqa: E402
from sgdb.storage import Database  # noqa: E402


@pytest.fixture
def books() -> Relation:
    return relation_from_mapping(gd.BOOKS, primary_key="ISBN", fields=gd.BOOKS_FIELDS)


@pytest.fixture
def catalog() -> Relation:
    return relation_from_mapping(gd.CATALOG, primary_key="catalog", fields=gd.CATALOG_FIELDS)


def load_fixture_db(root) -> Database:
    """Create a database directory holding the books and catalog tables."""
    db = Database(root)
    from sgdb.model import Schema

    with db.create("books", Schema("ISBN", gd.BOOKS_FIELDS), sync=False) as table:
        for record in gd.BOOKS.values():
            table.put_record(record)
    with db.create("catalog", Schema("catalog", gd.CATALOG_FIELDS), sync=False) as table:
        for record in gd.CATALOG.values():
            table.put_record(record)
    return db


@pytest.fixture
def db(tmp_path) -> Database:
    return load_fixture_db(tmp_path / "db")

import pytest

import golden_data as gd

from sgdb.dsl import (
    CreateTable,
    CrossStep,
    Delete,
    DropTable,
    Insert,
    JoinStep,
    NaturalJoinStep,
    ProjectStep,
    Query,
    RenameStep,
    SelectStep,
    ShowTables,
    parse,
    parse_script,
    render_statement,
    tokenize,
)
from sgdb.errors import LexError, ParseError, UnknownTableError
from sgdb.evaluator import Status, evaluate
from sgdb.model import relation_equal, relation_from_mapping
from sgdb.ops import STAR, Condition


# --- lexer ---------------------------------------------------------------


def test_tokenize_pipeline():
    kinds = [(t.kind, t.text) for t in tokenize("books | select publisher = \"O'Reilly\"")]
    assert kinds == [
        ("IDENT", "books"),
        ("PIPE", "|"),
        ("KEYWORD", "select"),
        ("IDENT", "publisher"),
        ("EQUALS", "="),
        ("STRING", "O'Reilly"),
    ]


def test_tokenize_quoted_name_with_space():
    kinds = [(t.kind, t.text) for t in tokenize('project title, "first author"')]
    assert kinds == [
        ("KEYWORD", "project"),
        ("IDENT", "title"),
        ("COMMA", ","),
        ("STRING", "first author"),
    ]


def test_tokenize_positions_are_one_based():
    tokens = tokenize("books |\n  select a = b")
    assert (tokens[0].line, tokens[0].col) == (1, 1)
    assert (tokens[2].line, tokens[2].col) == (2, 3)


def test_tokenize_unterminated_string_points_at_open_quote():
    with pytest.raises(LexError) as err:
        tokenize('select x = "unterminated')
    assert (err.value.line, err.value.col) == (1, 12)


def test_tokenize_escapes_and_comments():
    tokens = tokenize('insert t { a: "q\\"uote" } # trailing note')
    assert tokens[-1].kind == "RBRACE"
    assert tokens[5].text == 'q"uote'


def test_tokenize_rejects_stray_characters():
    with pytest.raises(LexError):
        tokenize("books ? select")


# --- parser --------------------------------------------------------------


def test_parse_full_pipeline():
    stmt = parse(
        'books | ijoin catalog on catalog | select "catalog.catalog" = "001"'
        ' | project title, "catalog.description"'
    )
    assert stmt == Query(
        "books",
        (
            JoinStep("inner", "catalog", "catalog"),
            SelectStep(Condition("catalog.catalog", "001")),
            ProjectStep(("title", "catalog.description")),
        ),
    )


def test_parse_natural_join():
    assert parse("books | njoin catalog") == Query("books", (NaturalJoinStep("catalog"),))


def test_parse_bare_table_scan():
    assert parse("books") == Query("books", ())


def test_parse_project_star_and_rename():
    assert parse("books | project *") == Query("books", (ProjectStep(STAR),))
    assert parse("catalog | rename description -> category") == Query(
        "catalog", (RenameStep("description", "category"),)
    )


def test_parse_join_variants_and_cross():
    assert parse("b | ljoin c on k").steps == (JoinStep("left", "c", "k"),)
    assert parse("b | rjoin c on k").steps == (JoinStep("right", "c", "k"),)
    assert parse("b | ojoin c on k").steps == (JoinStep("outer", "c", "k"),)
    assert parse("b | cross c as k").steps == (CrossStep("c", "k"),)


def test_parse_dangling_pipe_is_an_error_with_expectations():
    with pytest.raises(ParseError) as err:
        parse("books |")
    assert err.value.expected  # non-empty expected set
    assert "select" in err.value.expected


def test_parse_statements():
    assert parse("create table books pk ISBN fields ISBN, title, \"first author\"") == CreateTable(
        "books", "ISBN", ("ISBN", "title", "first author")
    )
    assert parse("drop table books") == DropTable("books")
    assert parse("insert books { ISBN: 9780596159818, title: \"Beautiful testing\" }") == Insert(
        "books", (("ISBN", "9780596159818"), ("title", "Beautiful testing"))
    )
    assert parse("delete books key 9780596159818") == Delete("books", "9780596159818")
    assert parse("show tables") == ShowTables()


def test_parse_script_splits_on_semicolons():
    script = "show tables;\n# a comment\nbooks | project *;\n"
    statements = parse_script(script)
    assert statements == [ShowTables(), Query("books", (ProjectStep(STAR),))]
    assert parse_script("  \n# only a comment\n") == []


def test_parse_trailing_garbage_rejected():
    with pytest.raises(ParseError):
        parse("show tables books")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("books | rename description category")
    assert err.value.line == 1
    assert err.value.col == 28
    assert "->" in err.value.expected


# --- pretty printer -------------------------------------------------------


ROUND_TRIP_STATEMENTS = [
    "books",
    "books | project *",
    'books | select publisher = "O\'Reilly" | project title, "first author"',
    "books | ijoin catalog on catalog | select catalog.catalog = \"001\"",
    "b | ljoin c on k | rjoin d on k | ojoin e on k | cross f as k | njoin g",
    'catalog | rename description -> category',
    'create table books pk ISBN fields ISBN, title, "first author"',
    "drop table books",
    'insert books { ISBN: 9780596159818, title: "Beautiful testing", note: "with \\"quotes\\"" }',
    "delete books key 9780596159818",
    "show tables",
    'books | select note = ""',
    'books | select "weird name" = "va|ue;"',
]


@pytest.mark.parametrize("text", ROUND_TRIP_STATEMENTS)
def test_printer_round_trip(text):
    ast = parse(text)
    rendered = render_statement(ast)
    assert parse(rendered) == ast
    assert render_statement(parse(rendered)) == rendered


# --- evaluation ------------------------------------------------------------


def test_evaluate_pipeline_matches_direct_composition(db):
    stmt = parse(
        'books | ijoin catalog on catalog | select catalog.catalog = "001"'
        " | project title, catalog.description"
    )
    result = evaluate(stmt, db)
    assert result.rows == gd.PIPELINE_COMPUTING_TITLES


def test_evaluate_rename_pipeline(db):
    result = evaluate(parse("catalog | rename description -> category"), db)
    assert result.rows == gd.RENAME_CATEGORY


def test_evaluate_unknown_table(db):
    with pytest.raises(UnknownTableError):
        evaluate(parse('nosuch | select a = "b"'), db)


def test_evaluate_ddl_dml_cycle(tmp_path):
    from sgdb.storage import Database

    db = Database(tmp_path / "db")
    status = evaluate(parse("create table pets pk name fields name, kind"), db)
    assert isinstance(status, Status)
    status = evaluate(parse('insert pets { name: rex, kind: dog }'), db)
    assert status.affected == 1
    assert evaluate(parse("pets"), db).rows == {"rex": {"name": "rex", "kind": "dog"}}
    assert evaluate(parse("delete pets key rex"), db).affected == 1
    assert evaluate(parse("delete pets key rex"), db).affected == 0
    listing = evaluate(parse("show tables"), db)
    assert listing.message == "pets"
    evaluate(parse("drop table pets"), db)
    assert evaluate(parse("show tables"), db).message == "(no tables)"


def test_dsl_results_match_api_for_goldens(db, books, catalog):
    from sgdb import ops

    cases = {
        "books | select publisher = \"O'Reilly\"": ops.select(
            books, Condition("publisher", "O'Reilly")
        ),
        "books | njoin catalog": ops.natural_join(books, catalog),
        "books | cross catalog as catalog": ops.cartesian(books, catalog, "catalog"),
        "books | project *": ops.project(books, STAR),
    }
    for text, expected in cases.items():
        assert relation_equal(evaluate(parse(text), db), expected), text

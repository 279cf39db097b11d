"""Command-line front end: REPL, one-shot exec, script runner, CSV in/out.

Exit codes: 0 success, 2 lex/parse error, 3 evaluation or storage error.
``difftest`` exits 1 when any divergence is found.
"""

from __future__ import annotations

import argparse
import os
import sys

from sgdb import csvio, dsl
from sgdb.difftest import ALL_OPS, differential_check
from sgdb.errors import LexError, ParseError, SgdbError
from sgdb.evaluator import Status, evaluate
from sgdb.model import Relation
from sgdb.render import FORMATS, RenderSpec, render
from sgdb.storage import Database

PROMPT = "sgdb> "
CONTINUATION = "....> "


def _print_result(result: Relation | Status, spec: RenderSpec, out) -> None:
    if isinstance(result, Relation):
        out.write(render(result, spec))
    else:
        out.write(result.message + "\n")


def _print_positioned_error(exc: LexError | ParseError, text: str, out) -> None:
    out.write(f"error: {exc}\n")
    lines = text.split("\n")
    if 1 <= exc.line <= len(lines):
        out.write(f"  {lines[exc.line - 1]}\n")
        out.write("  " + " " * (exc.col - 1) + "^\n")


def _exec_text(db: Database, text: str, spec: RenderSpec, out, err) -> int:
    try:
        statements = dsl.parse_script(text)
    except (LexError, ParseError) as exc:
        _print_positioned_error(exc, text, err)
        return 2
    for stmt in statements:
        try:
            result = evaluate(stmt, db)
        except SgdbError as exc:
            err.write(f"error: {exc}\n")
            return 3
        _print_result(result, spec, out)
    return 0


def run_repl(db: Database, stdin=None, out=None) -> int:
    """Read statements (terminated by ';'), evaluate, render; errors keep the session alive."""
    stdin = stdin if stdin is not None else sys.stdin
    out = out if out is not None else sys.stdout
    interactive = stdin.isatty()
    buffer: list[str] = []
    if interactive:
        out.write(PROMPT)
        out.flush()
    for line in stdin:
        buffer.append(line)
        if ";" in line:
            text = "".join(buffer).strip()
            buffer = []
            if text:
                _exec_text(db, text, RenderSpec(), out, out)
        if interactive:
            out.write(PROMPT if not buffer else CONTINUATION)
            out.flush()
    leftover = "".join(buffer).strip()
    if leftover:
        _exec_text(db, leftover, RenderSpec(), out, out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdb", description="Star-graph relational engine")
    parser.add_argument(
        "--db",
        default=os.environ.get("SGDB_DB"),
        help="database directory (or set SGDB_DB)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("repl", help="interactive session")

    p_exec = sub.add_parser("exec", help="run one statement (or a ';'-separated script)")
    p_exec.add_argument("-e", "--statement", required=True)
    p_exec.add_argument("--format", choices=FORMATS, default="table")

    p_run = sub.add_parser("run", help="run a script file")
    p_run.add_argument("script")
    p_run.add_argument("--format", choices=FORMATS, default="table")

    p_imp = sub.add_parser("import", help="load a CSV file into a new table")
    p_imp.add_argument("table")
    p_imp.add_argument("csv")
    p_imp.add_argument("--pk", required=True, help="primary-key column name")

    p_exp = sub.add_parser("export", help="write a table to a CSV file")
    p_exp.add_argument("table")
    p_exp.add_argument("csv")

    p_diff = sub.add_parser("difftest", help="engine vs naive-oracle differential run")
    p_diff.add_argument("--seeds", type=int, default=1000)
    p_diff.add_argument("--ops", default=",".join(ALL_OPS), help="comma-separated operator names")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if not args.db:
        print("error: no database directory (use --db or SGDB_DB)", file=sys.stderr)
        return 2
    db = Database(args.db)
    try:
        if args.command == "repl":
            return run_repl(db)
        if args.command == "exec":
            return _exec_text(db, args.statement, RenderSpec(format=args.format), sys.stdout, sys.stderr)
        if args.command == "run":
            with open(args.script, encoding="utf-8") as fh:
                text = fh.read()
            return _exec_text(db, text, RenderSpec(format=args.format), sys.stdout, sys.stderr)
        if args.command == "import":
            count = csvio.import_csv(db, args.table, args.csv, args.pk)
            print(f"imported {count} rows into {args.table}")
            return 0
        if args.command == "export":
            count = csvio.export_csv(db, args.table, args.csv)
            print(f"exported {count} rows from {args.table}")
            return 0
        if args.command == "difftest":
            operators = tuple(op.strip() for op in args.ops.split(",") if op.strip())
            unknown = [op for op in operators if op not in ALL_OPS]
            if unknown:
                print(f"error: unknown operators {unknown}", file=sys.stderr)
                return 2
            reports = differential_check(range(args.seeds), operators)
            print(
                f"difftest: {args.seeds} seeds x {len(operators)} operators, "
                f"{len(reports)} divergences"
            )
            for report in reports:
                print(str(report))
            return 1 if reports else 0
    except SgdbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())

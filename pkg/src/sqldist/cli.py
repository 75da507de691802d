"""Command-line interface for one-shot and batch grading.

Queries are given inline or, with an ``@`` prefix, read from a file. With no
start query the distance is measured from the empty query, which doubles as
the difficulty of the destination. Exit codes: 0 found, 1 aborted beyond the
maximum distance (0 points), 2 input or parse error, 3 unusable destination.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .ast_nodes import QueryAst, render
from .edits import EditCatalogError, EditSet, default_edit_set, parse_cost_overrides
from .grading import (
    GradingConfig,
    build_report,
    format_number,
    format_report,
    report_to_dict,
)
from .parser import ParseError, parse_query, parse_schema
from .schema import Schema, SchemaDeductionError
from .search import NonExecutableDestination, SearchStatus, shortest_distance

EXIT_FOUND = 0
EXIT_EXCEEDED = 1
EXIT_INPUT_ERROR = 2
EXIT_BAD_DESTINATION = 3


class _InputError(Exception):
    pass


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sqldist",
        description="Grade SQL queries by their semantic edit distance to a reference solution.",
    )
    p.add_argument("--schema", metavar="PATH", help="schema file: one table(col, ...) per line")
    p.add_argument(
        "--destination",
        metavar="SQL|@PATH",
        help="reference solution, inline or @file",
    )
    p.add_argument("--start", metavar="SQL|@PATH", help="submitted query, inline or @file")
    p.add_argument(
        "--starts-dir",
        metavar="DIR",
        help="grade every file in a directory against the destination",
    )
    p.add_argument("--costs", metavar="PATH", help="cost overrides: editName = integer, one per line")
    p.add_argument("--max-distance", type=int, metavar="N", help="abort the search beyond this distance")
    p.add_argument("--slack", type=int, default=1, metavar="N", help="search-bound slack (default 1)")
    p.add_argument("--max-points", type=float, default=10.0, metavar="P", help="maximum points (default 10)")
    p.add_argument("--scale", type=float, default=1.0, metavar="S", help="points per distance unit (default 1)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--list-edits", action="store_true", help="print the edit catalog and exit")
    p.add_argument("--quiet", action="store_true", help="no progress output on stderr")
    return p


def _read_file(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as err:
        raise _InputError(f"cannot read {what} {path!r}: {err}") from None


def _load_query(value: str, what: str) -> QueryAst:
    text = _read_file(value[1:], what) if value.startswith("@") else value
    try:
        return parse_query(text)
    except ParseError as err:
        raise _InputError(f"cannot parse {what}: {err}") from None


def _load_schema(path: Optional[str]) -> Optional[Schema]:
    if path is None:
        return None
    text = _read_file(path, "schema file")
    try:
        return parse_schema(text)
    except ParseError as err:
        raise _InputError(f"cannot parse schema file {path!r}: {err}") from None


def _load_edit_set(costs_path: Optional[str]) -> EditSet:
    edit_set = default_edit_set()
    if costs_path is None:
        return edit_set
    text = _read_file(costs_path, "cost file")
    try:
        overrides = parse_cost_overrides(text)
        return edit_set.configure_costs(overrides)
    except EditCatalogError as err:
        raise _InputError(f"bad cost file {costs_path!r}: {err}") from None


def _progress_printer(quiet: bool, stderr):
    if quiet:
        return None

    def on_progress(distance: int, fraction: float, visited: int) -> None:
        print(
            f"progress {fraction:.2f} distance {distance} visited {visited}",
            file=stderr,
        )

    return on_progress


def _grade_one(
    destination: QueryAst,
    start: Optional[QueryAst],
    schema: Optional[Schema],
    edit_set: EditSet,
    args,
    stderr,
) -> tuple:
    """-> (exit code, result document dict)"""
    config = GradingConfig(args.max_points, args.scale)
    started = time.monotonic()
    result = shortest_distance(
        destination,
        start,
        schema,
        edit_set,
        args.max_distance,
        slack=args.slack,
        on_progress=_progress_printer(args.quiet, stderr),
    )
    wall = time.monotonic() - started
    document = {
        "status": result.status.value,
        "visited": result.visited_count,
        "expanded": result.expanded_count,
        "wallTimeSeconds": wall,
    }
    if result.status is SearchStatus.FOUND:
        report = build_report(result, config)
        document.update(report_to_dict(report))
        document["text"] = format_report(report)
        return EXIT_FOUND, document
    document["distance"] = None
    document["points"] = 0
    document["steps"] = []
    if args.max_distance is not None:
        reason = f"distance exceeds the maximum of {args.max_distance}"
    else:
        reason = "destination unreachable with the configured edits"
    document["text"] = f"distance: {reason}\npoints: 0"
    return EXIT_EXCEEDED, document


def _echo_config(args) -> dict:
    return {
        "schema": args.schema,
        "maxDistance": args.max_distance,
        "slack": args.slack,
        "maxPoints": args.max_points,
        "scale": args.scale,
        "costs": args.costs,
    }


def _emit(document: dict, args, stdout) -> None:
    if args.format == "json":
        print(json.dumps(document, indent=2, sort_keys=True), file=stdout)
    else:
        print(document["text"], file=stdout)


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    args = _build_arg_parser().parse_args(argv)
    try:
        edit_set = _load_edit_set(args.costs)
        if args.list_edits:
            for edit in edit_set:
                print(
                    f"{edit.name}\t{edit.category.value}\t{edit.cost}\t{edit.description}",
                    file=stdout,
                )
            return EXIT_FOUND
        if args.destination is None:
            print("error: --destination is required", file=stderr)
            return EXIT_INPUT_ERROR
        if args.start is not None and args.starts_dir is not None:
            print("error: --start and --starts-dir are mutually exclusive", file=stderr)
            return EXIT_INPUT_ERROR

        schema = _load_schema(args.schema)
        destination = _load_query(args.destination, "destination query")

        if args.starts_dir is not None:
            return _run_batch(destination, schema, edit_set, args, stdout, stderr)

        start = _load_query(args.start, "start query") if args.start is not None else None
        code, document = _grade_one(destination, start, schema, edit_set, args, stderr)
        document["config"] = _echo_config(args)
        _emit(document, args, stdout)
        return code
    except _InputError as err:
        print(f"error: {err}", file=stderr)
        return EXIT_INPUT_ERROR
    except SchemaDeductionError as err:
        print(f"error: cannot deduce a schema from the destination: {err}", file=stderr)
        return EXIT_BAD_DESTINATION
    except NonExecutableDestination as err:
        print(f"error: {err}", file=stderr)
        return EXIT_BAD_DESTINATION


def _run_batch(destination, schema, edit_set, args, stdout, stderr) -> int:
    import os

    try:
        names = sorted(
            name
            for name in os.listdir(args.starts_dir)
            if os.path.isfile(os.path.join(args.starts_dir, name))
        )
    except OSError as err:
        raise _InputError(f"cannot read directory {args.starts_dir!r}: {err}") from None

    rows = []
    documents = {}
    worst = EXIT_FOUND
    for name in names:
        path = os.path.join(args.starts_dir, name)
        try:
            start = _load_query(f"@{path}", f"start query {name!r}")
            code, document = _grade_one(destination, start, schema, edit_set, args, stderr)
        except _InputError as err:
            print(f"error: {err}", file=stderr)
            worst = max(worst, EXIT_INPUT_ERROR)
            rows.append((name, "error", "-", "-"))
            documents[name] = {"status": "error", "message": str(err)}
            continue
        worst = max(worst, code)
        documents[name] = document
        distance = document.get("distance")
        rows.append(
            (
                name,
                document["status"],
                "-" if distance is None else str(distance),
                format_number(document["points"]),
            )
        )

    if args.format == "json":
        print(
            json.dumps(
                {"config": _echo_config(args), "results": documents},
                indent=2,
                sort_keys=True,
            ),
            file=stdout,
        )
    else:
        for name in names:
            document = documents[name]
            print(f"== {name}", file=stdout)
            print(document.get("text", document.get("message", "")), file=stdout)
            print("", file=stdout)
        widths = [max(len(row[i]) for row in rows + [("file", "status", "distance", "points")]) for i in range(4)]
        header = ("file", "status", "distance", "points")
        print("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)), file=stdout)
        for row in rows:
            print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)), file=stdout)
    return worst


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

Exit codes are part of the contract, for scripting:

    0  success
    1  data or validation error (bad schema, bad case, bad query ...)
    2  usage error (unknown flags, missing arguments)
    3  I/O error (unreadable file, unwritable output)

Machine output (``--json`` and `evaluate`) is plain JSON on stdout;
human tables also go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import service
from .casebase import (
    case_base_to_document,
    detect_format,
    load_case_base,
    save_case_base,
)
from .errors import CaseValidationError, GradecaseError, ParseError
from .evaluation import generate_feedback, leave_one_out, predict_final_grade
from .model import (
    make_query,
    schema_from_document,
    schema_to_document,
    student_schema,
)
from .similarity import DEFAULT_K, retrieve_k

BUILTIN_SCHEMAS = {"student": student_schema}


def _read_json_file(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not valid UTF-8") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None


def resolve_schema(ref: str):
    """A builtin name ('student') or a path to a schema document."""
    if ref in BUILTIN_SCHEMAS:
        return BUILTIN_SCHEMAS[ref]()
    return schema_from_document(_read_json_file(Path(ref)))


def load_base(path_text: str, schema_ref: str):
    """Load a case-base file, JSON or CSV by suffix."""
    path = Path(path_text)
    schema = resolve_schema(schema_ref)
    return load_case_base(path, detect_format(path), schema), schema


def parse_query_text(schema, text: str):
    """Build a query from `key=val,key=val` shorthand or inline JSON.

    Shorthand values are parsed by attribute type, so `gpa=3.0` is a
    number and `skillAssembly=yes` a boolean. JSON is the escape hatch
    for anything the shorthand cannot spell (commas, exotic strings).
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON query: {exc}") from None
        if not isinstance(values, dict):
            raise ParseError("query JSON must be an object")
        return make_query(schema, values)
    values = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, raw = chunk.partition("=")
        if not sep:
            raise ParseError(f"bad query pair {chunk!r}: expected name=value")
        name = name.strip()
        if name in schema.names:
            try:
                values[name] = schema.attribute(name).type.parse_text(raw.strip())
            except ValueError as exc:
                raise CaseValidationError(f"attribute {name!r}: {exc}") from None
        else:
            # keep the raw text; validation reports the unknown name
            values[name] = raw.strip()
    return make_query(schema, values)


def _describe_type(doc: dict) -> str:
    kind = doc["type"]
    if kind == "numeric":
        return f"numeric [{doc['min']:g}, {doc['max']:g}]"
    if kind == "grade":
        return "grade " + " < ".join(doc["scale"])
    if kind == "categorical":
        return "categorical {" + ", ".join(doc["allowed"]) + "}"
    return kind


def _echo_json(document) -> None:
    click.echo(json.dumps(document, indent=2, sort_keys=True))


@click.group()
def cli():
    """Case-based grade outlooks: retrieve, predict, evaluate, serve."""


# -- schema


@cli.group()
def schema():
    """Inspect and check schema documents."""


@schema.command("validate")
@click.argument("file", type=click.Path(dir_okay=False, path_type=Path))
def schema_validate(file: Path):
    """Parse FILE and report whether it is a usable schema."""
    loaded = schema_from_document(_read_json_file(file))
    click.echo(f"ok: schema {loaded.id!r} with {len(loaded)} attributes")


@schema.command("show")
@click.option("--builtin", "builtin", default="student", show_default=True,
              help="Name of a bundled schema.")
@click.option("--json", "as_json", is_flag=True, help="Print the schema document.")
def schema_show(builtin: str, as_json: bool):
    """Print a bundled schema."""
    if builtin not in BUILTIN_SCHEMAS:
        raise click.UsageError(
            f"unknown builtin {builtin!r} (have: {', '.join(sorted(BUILTIN_SCHEMAS))})"
        )
    doc = schema_to_document(BUILTIN_SCHEMAS[builtin]())
    if as_json:
        _echo_json(doc)
        return
    click.echo(f"schema: {doc['id']}")
    width = max(len(a["name"]) for a in doc["attributes"])
    for attr in doc["attributes"]:
        click.echo(
            f"  {attr['name']:<{width}}  {_describe_type(attr):<24}"
            f"  weight {attr['weight']:g}  {attr['group']}"
        )


# -- casebase


@cli.group()
def casebase():
    """Import and inspect case-base files."""


@casebase.command("import")
@click.argument("csvfile", type=click.Path(dir_okay=False))
@click.option("--schema", "schema_ref", default="student", show_default=True,
              help="Builtin schema name or path to a schema document.")
@click.option("-o", "--output", required=True,
              type=click.Path(dir_okay=False, path_type=Path),
              help="Where to write the JSON case base.")
def casebase_import(csvfile: str, schema_ref: str, output: Path):
    """Convert a CSV case base to the canonical JSON form."""
    path = Path(csvfile)
    schema = resolve_schema(schema_ref)
    base = load_case_base(path, "csv", schema)
    save_case_base(base, output, "json", schema)
    click.echo(f"wrote {output} ({len(base.cases)} cases)")


@casebase.command("list")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--schema", "schema_ref", default="student", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the full document.")
def casebase_list(file: str, schema_ref: str, as_json: bool):
    """List the cases in a case-base file."""
    base, schema_obj = load_base(file, schema_ref)
    if as_json:
        _echo_json(case_base_to_document(base))
        return
    for case in base.cases:
        parts = []
        for name in schema_obj.names:
            if name in case.values:
                rendered = schema_obj.attribute(name).type.format_text(case.values[name])
                parts.append(f"{name}={rendered}")
        click.echo(f"{case.id}: " + " ".join(parts))


# -- one-shot operations

_query_option = click.option(
    "--query", "query_text", required=True,
    help="Query as key=val pairs or inline JSON.")
_k_option = click.option(
    "-k", "k", default=DEFAULT_K, show_default=True, type=click.IntRange(min=1),
    help="Number of neighbors.")
_schema_option = click.option(
    "--schema", "schema_ref", default="student", show_default=True,
    help="Builtin schema name or path to a schema document.")


@cli.command()
@click.argument("casebase_file", type=click.Path(dir_okay=False))
@_query_option
@_k_option
@_schema_option
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def retrieve(casebase_file: str, query_text: str, k: int, schema_ref: str,
             as_json: bool):
    """Rank the most similar cases for a query."""
    base, schema_obj = load_base(casebase_file, schema_ref)
    query = parse_query_text(schema_obj, query_text)
    results = retrieve_k(base, schema_obj, query, k)
    if as_json:
        _echo_json({"results": [
            {"caseId": r.case_id, "score": r.score, "values": dict(r.case.values)}
            for r in results
        ]})
        return
    width = max(len(r.case_id) for r in results)
    for rank, result in enumerate(results, start=1):
        click.echo(f"{rank:>4}  {result.case_id:<{width}}  {result.score:.12g}")


@cli.command()
@click.argument("casebase_file", type=click.Path(dir_okay=False))
@_query_option
@_k_option
@_schema_option
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def predict(casebase_file: str, query_text: str, k: int, schema_ref: str,
            as_json: bool):
    """Formative outlook: likely final grade plus feedback."""
    base, schema_obj = load_base(casebase_file, schema_ref)
    query = parse_query_text(schema_obj, query_text)
    dist = predict_final_grade(base, schema_obj, query, k)
    feedback = generate_feedback(dist, query)
    if as_json:
        document = dist.to_document()
        document["feedback"] = feedback
        _echo_json(document)
        return
    click.echo("Nearest graded neighbors:")
    for result in dist.neighbors:
        grade = result.case.values[dist.grade_attribute]
        click.echo(f"  {result.case_id}  {grade}  {result.score:.12g}")
    click.echo(feedback)


@cli.command()
@click.argument("casebase_file", type=click.Path(dir_okay=False))
@_k_option
@_schema_option
def evaluate(casebase_file: str, k: int, schema_ref: str):
    """Leave-one-out accuracy report, as JSON."""
    base, schema_obj = load_base(casebase_file, schema_ref)
    _echo_json(leave_one_out(base, schema_obj, k).to_document())


# -- serve


@cli.command()
@click.option("--data", "data_dir", envvar="CASEBASE_DATA", required=True,
              type=click.Path(file_okay=False, path_type=Path),
              help="Directory of schema and case-base files "
                   "(env: CASEBASE_DATA).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--k", "default_k", default=DEFAULT_K, show_default=True,
              type=click.IntRange(min=1), help="Default neighbor count.")
@click.option("--session-timeout", default=service.DEFAULT_SESSION_TIMEOUT,
              show_default=True, type=float,
              help="Idle seconds before a session is closed.")
@click.option("--token", default=None, help="Require this bearer token.")
@click.option("--ui", "ui_dir", default=None,
              type=click.Path(file_okay=False, path_type=Path),
              help="Serve a static UI build under /ui.")
def serve(data_dir: Path, host: str, port: int, default_k: int,
          session_timeout: float, token, ui_dir):
    """Run the HTTP service."""
    config = service.ServiceConfig(
        data_dir=data_dir, host=host, port=port, default_k=default_k,
        session_timeout=session_timeout, auth_token=token, ui_dir=ui_dir,
    )
    service.serve(config)


def main(argv=None) -> int:
    """Console entry point with the exit-code contract applied."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except GradecaseError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

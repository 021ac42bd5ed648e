"""Case-base persistence: file connectors, retain semantics, the store.

A :class:`CaseBase` is an immutable snapshot (schema id + ordered cases
with unique ids). Connectors load snapshots from CSV or JSON files and
save them back in a canonical form, so saving the same base twice yields
byte-identical files and golden tests can compare at the byte level.

:class:`CaseBaseStore` holds the live, named bases an application works
against: it resolves schemas, serializes writers per base, and flushes
retained changes back to the originating file.
"""

from __future__ import annotations

import csv
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from .errors import (
    CaseValidationError,
    NotFoundError,
    ParseError,
)
from .model import (
    Case,
    CaseSchema,
    make_case,
    student_schema,
    validate_case,
)

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class CaseBase:
    """An immutable snapshot of stored cases for one schema."""

    schema_id: str
    cases: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        seen = {}
        for position, case in enumerate(self.cases):
            if case.id in seen:
                raise ParseError(
                    f"duplicate case id {case.id!r} "
                    f"(records #{seen[case.id] + 1} and #{position + 1})"
                )
            seen[case.id] = position

    def __len__(self):
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    @property
    def ids(self) -> tuple:
        return tuple(case.id for case in self.cases)

    def get_case(self, case_id: str) -> Case:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise NotFoundError(f"no case {case_id!r} in case base")

    def has_case(self, case_id: str) -> bool:
        return any(case.id == case_id for case in self.cases)

    def list_cases(self) -> List[Case]:
        return list(self.cases)


def _check_against_schema(schema: CaseSchema, case: Case, where: str = "") -> None:
    violations = validate_case(schema, case)
    if violations:
        prefix = f"{where}: " if where else ""
        raise CaseValidationError(
            prefix + f"case {case.id!r}: " + "; ".join(str(v) for v in violations),
            tuple(violations),
        )


def make_case_base(schema: CaseSchema, cases: Iterable[Case]) -> CaseBase:
    """Build a validated snapshot; every case must conform to the schema."""
    cases = tuple(cases)
    for case in cases:
        _check_against_schema(schema, case)
    return CaseBase(schema.id, cases)


def retain_case(base: CaseBase, case: Case, schema: CaseSchema) -> CaseBase:
    """Store a case: replace on an existing id, append on a fresh one.

    Validation happens before anything changes, so an invalid case
    leaves the base untouched.
    """
    _check_against_schema(schema, case)
    if base.has_case(case.id):
        cases = tuple(case if stored.id == case.id else stored for stored in base.cases)
    else:
        cases = base.cases + (case,)
    return CaseBase(base.schema_id, cases)


# ---------------------------------------------------------------------------
# JSON connector

def case_base_to_document(base: CaseBase) -> dict:
    return {
        "schemaId": base.schema_id,
        "cases": [{"id": case.id, "values": dict(case.values)} for case in base.cases],
    }


def case_base_from_document(doc, schema: CaseSchema) -> CaseBase:
    if not isinstance(doc, dict):
        raise ParseError("case base document must be a JSON object")
    unknown = set(doc) - {"schemaId", "cases"}
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)} in case base document")
    schema_id = doc.get("schemaId")
    if schema_id != schema.id:
        raise ParseError(
            f"case base declares schema {schema_id!r} but was loaded with {schema.id!r}"
        )
    records = doc.get("cases")
    if not isinstance(records, list):
        raise ParseError("case base document needs a 'cases' list")
    cases = []
    for position, record in enumerate(records):
        where = f"record #{position + 1}"
        if not isinstance(record, dict) or set(record) - {"id", "values"}:
            raise ParseError(f"{where}: expected an object with 'id' and 'values'")
        case_id = record.get("id")
        if not isinstance(case_id, str) or not case_id:
            raise ParseError(f"{where}: missing or empty case id")
        values = record.get("values", {})
        if not isinstance(values, dict):
            raise ParseError(f"{where}: 'values' must be an object")
        try:
            cases.append(make_case(schema, case_id, values))
        except CaseValidationError as exc:
            raise CaseValidationError(
                f"{where}: case {case_id!r}: {exc}", exc.violations
            ) from None
    return CaseBase(schema.id, tuple(cases))


def dumps_case_base(base: CaseBase) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(
        case_base_to_document(base), sort_keys=True, indent=2, ensure_ascii=False
    ) + "\n"


# ---------------------------------------------------------------------------
# CSV connector

def _csv_header(schema: CaseSchema) -> List[str]:
    return ["id", *schema.names]


def _case_to_row(schema: CaseSchema, case: Case) -> List[str]:
    row = [case.id]
    for spec in schema.attributes:
        value = case.values.get(spec.name)
        row.append("" if value is None else spec.type.format_text(value))
    return row


def _rows_to_cases(schema: CaseSchema, rows) -> List[Case]:
    cases = []
    positions: Dict[str, int] = {}
    for line_number, row in rows:
        if len(row) != len(schema) + 1:
            raise ParseError(
                f"row {line_number}: expected {len(schema) + 1} fields, got {len(row)}"
            )
        case_id = row[0]
        if not case_id:
            raise ParseError(f"row {line_number}: empty case id")
        if case_id in positions:
            raise ParseError(
                f"duplicate case id {case_id!r} (rows {positions[case_id]} and {line_number})"
            )
        positions[case_id] = line_number
        values = {}
        for spec, cell in zip(schema.attributes, row[1:]):
            if cell == "":
                continue
            try:
                values[spec.name] = spec.type.parse_text(cell)
            except ValueError as exc:
                raise CaseValidationError(
                    f"row {line_number}: case {case_id!r}: attribute {spec.name!r}: {exc}"
                ) from None
        cases.append(Case(case_id, values))
    return cases


def read_csv_case_base(lines: Iterable[str], schema: CaseSchema) -> CaseBase:
    reader = enumerate(csv.reader(lines), start=1)
    try:
        _, header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV file: missing header row") from None
    if header != _csv_header(schema):
        raise ParseError(
            f"CSV header {header!r} does not match schema columns {_csv_header(schema)!r}"
        )
    return CaseBase(schema.id, tuple(_rows_to_cases(schema, reader)))


def write_csv_case_base(base: CaseBase, schema: CaseSchema) -> str:
    import io

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_csv_header(schema))
    for case in base.cases:
        writer.writerow(_case_to_row(schema, case))
    return out.getvalue()


# ---------------------------------------------------------------------------
# file-level API

def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".json":
        return "json"
    raise ParseError(f"cannot infer case-base format from {Path(path).name!r}")


def load_case_base(path, fmt: str, schema: CaseSchema) -> CaseBase:
    """Load and fully validate a case base file. Row order is preserved."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "csv":
        base = read_csv_case_base(text.splitlines(), schema)
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {Path(path).name}: {exc}") from None
        base = case_base_from_document(doc, schema)
    for case in base.cases:
        _check_against_schema(schema, case)
    return base


def save_case_base(base: CaseBase, path, fmt: str, schema: CaseSchema) -> None:
    """Write the canonical file form (stable bytes for identical bases)."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "csv":
        text = write_csv_case_base(base, schema)
    else:
        text = dumps_case_base(base)
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# the store: live bases + schema registry

class _Entry:
    __slots__ = ("base", "schema", "path", "fmt", "lock", "dirty")

    def __init__(self, base, schema, path, fmt):
        self.base = base
        self.schema = schema
        self.path = path
        self.fmt = fmt
        self.lock = threading.Lock()
        self.dirty = False


class CaseBaseStore:
    """Named live case bases plus the schemas they are validated against.

    Reads hand out immutable snapshots without coordination; retains are
    serialized per base so two sessions can never interleave a
    read-modify-write.
    """

    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory is not None else None
        self._schemas: Dict[str, CaseSchema] = {}
        self._entries: Dict[str, _Entry] = {}
        self._registry_lock = threading.Lock()
        self.add_schema(student_schema())

    # -- schemas

    def add_schema(self, schema: CaseSchema) -> None:
        self._schemas[schema.id] = schema

    def get_schema(self, schema_id: str) -> CaseSchema:
        try:
            return self._schemas[schema_id]
        except KeyError:
            raise NotFoundError(f"unknown schema {schema_id!r}") from None

    def schema_ids(self) -> List[str]:
        return sorted(self._schemas)

    # -- case bases

    def ids(self) -> List[str]:
        return sorted(self._entries)

    def _entry(self, base_id: str) -> _Entry:
        try:
            return self._entries[base_id]
        except KeyError:
            raise NotFoundError(f"unknown case base {base_id!r}") from None

    def get(self, base_id: str) -> CaseBase:
        return self._entry(base_id).base

    def schema_for(self, base_id: str) -> CaseSchema:
        return self._entry(base_id).schema

    def register(self, base_id: str, base: CaseBase, *, path=None, fmt="json",
                 persist: bool = False) -> None:
        """Bind a base under a name, optionally writing it to disk now."""
        schema = self.get_schema(base.schema_id)
        if path is None and self.directory is not None:
            path = self.directory / f"{base_id}.{fmt}"
        with self._registry_lock:
            self._entries[base_id] = _Entry(base, schema, path, fmt)
        if persist and path is not None:
            save_case_base(base, path, fmt, schema)

    def open_file(self, path, *, base_id: Optional[str] = None,
                  schema_id: Optional[str] = None) -> str:
        """Load one case-base file and register it under its stem or ``base_id``.

        JSON files name their own schema; CSV files use ``schema_id``
        (default: the bundled student schema).
        """
        path = Path(path)
        fmt = detect_format(path)
        if fmt == "json":
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON in {path.name}: {exc}") from None
            if not isinstance(doc, dict) or "schemaId" not in doc:
                raise ParseError(f"{path.name}: not a case base document")
            schema = self.get_schema(doc["schemaId"])
        else:
            schema = self.get_schema(schema_id or student_schema().id)
        base = load_case_base(path, fmt, schema)
        name = base_id or path.stem
        self.register(name, base, path=path, fmt=fmt)
        return name

    def scan_directory(self) -> List[str]:
        """Load every schema and case base file in the store directory.

        ``*.schema.json`` files are schema definitions; other ``*.json``
        and ``*.csv`` files are case bases.
        """
        from .model import schema_from_document

        if self.directory is None:
            return []
        loaded = []
        files = sorted(self.directory.iterdir())
        for path in files:
            if path.name.endswith(".schema.json"):
                doc = json.loads(path.read_text(encoding="utf-8"))
                self.add_schema(schema_from_document(doc))
        for path in files:
            if path.name.endswith(".schema.json") or path.suffix.lower() not in (".csv", ".json"):
                continue
            loaded.append(self.open_file(path))
        return loaded

    def retain(self, base_id: str, case: Case) -> CaseBase:
        """Apply retain semantics to the live base, one writer at a time."""
        entry = self._entry(base_id)
        with entry.lock:
            entry.base = retain_case(entry.base, case, entry.schema)
            entry.dirty = True
            return entry.base

    def flush(self, base_id: str) -> None:
        """Write the current snapshot back to its file, if it has one."""
        entry = self._entry(base_id)
        with entry.lock:
            if entry.path is not None:
                save_case_base(entry.base, entry.path, entry.fmt, entry.schema)
            entry.dirty = False

    def flush_all(self) -> None:
        for base_id in self.ids():
            self.flush(base_id)

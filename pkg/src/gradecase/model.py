"""Schemas, attribute types, cases and queries.

A :class:`CaseSchema` declares the named, typed, weighted attributes a
case may carry, partitioned into the four classic groups (description,
solution, result, justification). Cases and queries are plain immutable
value objects; everything that needs a schema to be interpreted
(validation, normalization, text parsing) lives here as functions so the
rest of the workbench can stay schema-agnostic.

Schemas and cases never change after construction, so they are safe to
share freely between threads and sessions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from .errors import CaseValidationError, SchemaError, UnknownGradeError

GROUPS = ("description", "solution", "result", "justification")

#: Five-level letter scale used by the bundled student schema, worst to best.
DEFAULT_GRADE_SCALE = ("E", "D", "C", "B", "A")


def parse_grade(text: str, scale: Sequence[str]) -> str:
    """Resolve ``text`` to a member of ``scale``, case-insensitively.

    Returns the canonical label as spelled in the scale. Raises
    :class:`UnknownGradeError` when the label is not on the scale.
    """
    if not scale:
        raise SchemaError("grade scale is empty")
    for label in scale:
        if label.lower() == text.strip().lower():
            return label
    raise UnknownGradeError(
        f"unknown grade {text!r}: expected one of {', '.join(scale)}"
    )


class AttributeType:
    """Base class for the value types an attribute can take."""

    kind: str = "abstract"
    #: Whether two values of this type can be compared by similarity.
    comparable: bool = True

    def conform(self, value: Any) -> Any:
        """Return ``value`` normalized, or raise ``ValueError``."""
        raise NotImplementedError

    def parse_text(self, text: str) -> Any:
        """Parse a CSV/CLI cell into a value (raises ``ValueError``)."""
        raise NotImplementedError

    def format_text(self, value: Any) -> str:
        """Render a value as a CSV/CLI cell. Inverse of :meth:`parse_text`."""
        return str(value)

    def document_fields(self) -> dict:
        """Type-specific keys for the schema-definition document."""
        return {}


@dataclass(frozen=True)
class NumericType(AttributeType):
    """A real value inside a fixed ``[min, max]`` range.

    The range comes from the schema, never from observed data, so
    similarity stays stable as cases are added.
    """

    min: float
    max: float
    kind = "numeric"

    def __post_init__(self):
        if not self.min < self.max:
            raise SchemaError(f"min >= max ({self.min} >= {self.max})")

    @property
    def span(self) -> float:
        return self.max - self.min

    def conform(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"expected a number, got {value!r}")
        out = float(value)
        if not self.min <= out <= self.max:
            raise ValueError(f"value {out} out of range [{self.min:g}, {self.max:g}]")
        return out

    def parse_text(self, text):
        try:
            return self.conform(float(text))
        except (TypeError, ValueError) as exc:
            if "out of range" in str(exc):
                raise
            raise ValueError(f"expected a number, got {text!r}") from None

    def format_text(self, value):
        return repr(float(value))

    def document_fields(self):
        return {"min": self.min, "max": self.max}


@dataclass(frozen=True)
class GradeType(AttributeType):
    """An ordinal letter grade on a fixed scale, ordered worst to best."""

    scale: tuple = DEFAULT_GRADE_SCALE
    kind = "grade"

    def __post_init__(self):
        object.__setattr__(self, "scale", tuple(self.scale))
        if not self.scale:
            raise SchemaError("empty grade scale")
        if len(set(self.scale)) != len(self.scale):
            raise SchemaError(f"grade scale has duplicate labels: {self.scale}")

    def rank(self, label: str) -> int:
        """Position of ``label`` on the scale (0 = worst)."""
        return self.scale.index(label)

    def conform(self, value):
        if not isinstance(value, str):
            raise ValueError(f"expected a grade label, got {value!r}")
        return parse_grade(value, self.scale)

    def parse_text(self, text):
        return parse_grade(text, self.scale)

    def document_fields(self):
        return {"scale": list(self.scale)}


@dataclass(frozen=True)
class BooleanType(AttributeType):
    """A has/has-not flag, e.g. for skills and experiences."""

    kind = "boolean"

    def conform(self, value):
        if not isinstance(value, bool):
            raise ValueError(f"expected true/false, got {value!r}")
        return value

    def parse_text(self, text):
        lowered = text.strip().lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true/false, got {text!r}")

    def format_text(self, value):
        return "true" if value else "false"


@dataclass(frozen=True)
class CategoricalType(AttributeType):
    """An unordered label from a fixed allowed set."""

    allowed: frozenset
    kind = "categorical"

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))
        if not self.allowed:
            raise SchemaError("categorical allowed set is empty")

    def conform(self, value):
        if not isinstance(value, str) or value not in self.allowed:
            raise ValueError(
                f"value {value!r} not in allowed set {sorted(self.allowed)}"
            )
        return value

    def parse_text(self, text):
        return self.conform(text)

    def document_fields(self):
        return {"allowed": sorted(self.allowed)}


@dataclass(frozen=True)
class TextType(AttributeType):
    """Free text (identifiers, notes). Never enters similarity."""

    kind = "text"
    comparable = False

    def conform(self, value):
        if not isinstance(value, str):
            raise ValueError(f"expected text, got {value!r}")
        return value

    def parse_text(self, text):
        return text


@dataclass(frozen=True)
class AttributeSpec:
    """One named, typed, weighted attribute of a schema."""

    name: str
    type: AttributeType
    weight: float = 1.0
    group: str = "description"

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if not 0.0 <= self.weight <= 1.0:
            raise SchemaError(
                f"attribute {self.name!r}: weight out of range [0, 1] ({self.weight})"
            )
        if self.group not in GROUPS:
            raise SchemaError(
                f"attribute {self.name!r}: unknown group {self.group!r}"
            )
        if not self.type.comparable and self.weight != 0.0:
            raise SchemaError(
                f"attribute {self.name!r}: text attributes must carry weight 0"
            )


@dataclass(frozen=True)
class CaseSchema:
    """An ordered list of attribute specs plus an identifier."""

    id: str
    attributes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes:
            raise SchemaError("schema needs at least one attribute")
        seen = set()
        for spec in self.attributes:
            if spec.name in seen:
                raise SchemaError(f"duplicate attribute {spec.name!r}")
            seen.add(spec.name)
        if not any(
            spec.group == "description" and spec.weight > 0.0
            for spec in self.attributes
        ):
            raise SchemaError(
                "schema needs at least one description attribute with weight > 0"
            )

    def __len__(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> tuple:
        return tuple(spec.name for spec in self.attributes)

    def attribute(self, name: str) -> AttributeSpec:
        for spec in self.attributes:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def group_specs(self, group: str) -> tuple:
        return tuple(spec for spec in self.attributes if spec.group == group)

    def description_specs(self) -> tuple:
        return self.group_specs("description")


@dataclass(frozen=True)
class Case:
    """One stored record: an id plus values for a subset of attributes.

    Absent attributes are simply missing from ``values``; ``None`` is
    never a stored value.
    """

    id: str
    values: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def get(self, name: str, default=None):
        return self.values.get(name, default)


@dataclass(frozen=True)
class Query:
    """A partial description of a new case: the facts known so far."""

    values: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))


@dataclass(frozen=True)
class Violation:
    """One way a case fails its schema."""

    attribute: Optional[str]
    message: str

    def __str__(self):
        return f"{self.attribute}: {self.message}" if self.attribute else self.message


# ---------------------------------------------------------------------------
# validation helpers


def validate_values(schema: CaseSchema, values: Mapping[str, Any]) -> list:
    """Collect violations of ``values`` against ``schema``. Never raises."""
    violations = []
    for name, value in values.items():
        try:
            spec = schema.attribute(name)
        except KeyError:
            violations.append(Violation(name, "unknown attribute"))
            continue
        if value is None:
            violations.append(Violation(name, "null is not a value; omit the key"))
            continue
        try:
            spec.type.conform(value)
        except (ValueError, UnknownGradeError) as exc:
            violations.append(Violation(name, str(exc)))
    return violations


def validate_case(schema: CaseSchema, case: Case) -> list:
    """Validation report for one case: empty list means conforming."""
    violations = []
    if not case.id:
        violations.append(Violation(None, "case id must be non-empty"))
    violations.extend(validate_values(schema, case.values))
    return violations


def normalize_values(schema: CaseSchema, values: Mapping[str, Any]) -> dict:
    """Return ``values`` with every entry conformed (floats, canonical grades).

    Raises :class:`CaseValidationError` carrying the full violation list
    when anything does not conform.
    """
    violations = validate_values(schema, values)
    if violations:
        raise CaseValidationError(
            "; ".join(str(v) for v in violations), tuple(violations)
        )
    return {
        name: schema.attribute(name).type.conform(value)
        for name, value in values.items()
    }


def make_case(schema: CaseSchema, case_id: str, values: Mapping[str, Any]) -> Case:
    """Build a normalized, validated case or raise ``CaseValidationError``."""
    if not case_id:
        raise CaseValidationError("case id must be non-empty")
    return Case(case_id, normalize_values(schema, values))


def make_query(schema: CaseSchema, values: Mapping[str, Any]) -> Query:
    """Build a normalized query, enforcing the query-side invariants.

    Values must belong to description-group attributes and at least one
    of them must carry weight > 0, otherwise no retrieval could rank
    anything.
    """
    violations = validate_values(schema, values)
    for name in values:
        if any(v.attribute == name for v in violations):
            continue
        if schema.attribute(name).group != "description":
            violations.append(Violation(name, "queries may only set description attributes"))
    if violations:
        raise CaseValidationError(
            "; ".join(str(v) for v in violations), tuple(violations)
        )
    if not any(schema.attribute(name).weight > 0.0 for name in values):
        raise CaseValidationError(
            "query needs at least one value on an attribute with weight > 0"
        )
    return Query(
        {name: schema.attribute(name).type.conform(v) for name, v in values.items()}
    )


def query_from_case(schema: CaseSchema, case: Case) -> Query:
    """Project a case onto its weighted description attributes."""
    values = {
        spec.name: case.values[spec.name]
        for spec in schema.description_specs()
        if spec.weight > 0.0 and spec.name in case.values
    }
    return make_query(schema, values)


# ---------------------------------------------------------------------------
# schema-definition documents

_TYPE_REGISTRY = {
    "numeric": (NumericType, {"min", "max"}),
    "grade": (GradeType, {"scale"}),
    "boolean": (BooleanType, set()),
    "categorical": (CategoricalType, {"allowed"}),
    "text": (TextType, set()),
}

_ATTR_BASE_KEYS = {"name", "type", "weight", "group"}


def _attribute_from_document(doc: Mapping[str, Any], position: int) -> AttributeSpec:
    if not isinstance(doc, Mapping):
        raise SchemaError(f"attribute #{position}: expected an object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError(f"attribute #{position}: missing or empty 'name'")
    kind = doc.get("type")
    if kind not in _TYPE_REGISTRY:
        raise SchemaError(
            f"attribute {name!r}: unknown type {kind!r} "
            f"(expected one of {sorted(_TYPE_REGISTRY)})"
        )
    cls, type_keys = _TYPE_REGISTRY[kind]
    allowed_keys = _ATTR_BASE_KEYS | type_keys
    unknown = set(doc) - allowed_keys
    if unknown:
        raise SchemaError(f"attribute {name!r}: unknown keys {sorted(unknown)}")
    missing = type_keys - set(doc)
    if missing:
        raise SchemaError(f"attribute {name!r}: missing keys {sorted(missing)}")

    if kind == "numeric":
        attr_type = NumericType(float(doc["min"]), float(doc["max"]))
    elif kind == "grade":
        scale = doc["scale"]
        if not isinstance(scale, list) or not all(isinstance(s, str) for s in scale):
            raise SchemaError(f"attribute {name!r}: 'scale' must be a list of labels")
        attr_type = GradeType(tuple(scale))
    elif kind == "categorical":
        allowed = doc["allowed"]
        if not isinstance(allowed, list) or not all(isinstance(s, str) for s in allowed):
            raise SchemaError(f"attribute {name!r}: 'allowed' must be a list of labels")
        attr_type = CategoricalType(frozenset(allowed))
    else:
        attr_type = cls()

    weight = doc.get("weight")
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise SchemaError(f"attribute {name!r}: missing or non-numeric 'weight'")
    group = doc.get("group")
    if group not in GROUPS:
        raise SchemaError(
            f"attribute {name!r}: missing or unknown 'group' (expected one of {GROUPS})"
        )
    try:
        return AttributeSpec(name, attr_type, float(weight), group)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(f"attribute {name!r}: {exc}") from None


def schema_from_document(doc: Mapping[str, Any]) -> CaseSchema:
    """Parse and validate a schema-definition document.

    The document is a JSON object ``{"id": ..., "attributes": [...]}``;
    unknown keys anywhere are rejected so typos never pass silently.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("schema document must be a JSON object")
    unknown = set(doc) - {"id", "attributes"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)} in schema document")
    schema_id = doc.get("id")
    if not isinstance(schema_id, str) or not schema_id:
        raise SchemaError("schema document needs a non-empty string 'id'")
    attr_docs = doc.get("attributes")
    if not isinstance(attr_docs, list):
        raise SchemaError("schema document needs an 'attributes' list")
    attributes = [
        _attribute_from_document(attr_doc, position)
        for position, attr_doc in enumerate(attr_docs)
    ]
    return CaseSchema(schema_id, tuple(attributes))


def schema_to_document(schema: CaseSchema) -> dict:
    """Serialize a schema back to its definition document (round-trips)."""
    attributes = []
    for spec in schema.attributes:
        doc = {"name": spec.name, "type": spec.type.kind}
        doc.update(spec.type.document_fields())
        doc["weight"] = spec.weight
        doc["group"] = spec.group
        attributes.append(doc)
    return {"id": schema.id, "attributes": attributes}


# ---------------------------------------------------------------------------
# bundled student schema

STUDENT_SCHEMA_ID = "student"


def student_schema() -> CaseSchema:
    """The bundled Microprocessor Systems student schema.

    Eleven attributes: an identifier, GPA, two prerequisite course
    grades, three skill flags, two quizzes and a mid-exam, and the final
    grade as the solution. Description attributes default to weight 1.0;
    the identifier and final grade never enter similarity.
    """
    grade = GradeType(DEFAULT_GRADE_SCALE)
    return CaseSchema(
        STUDENT_SCHEMA_ID,
        (
            AttributeSpec("studentId", TextType(), 0.0, "justification"),
            AttributeSpec("gpa", NumericType(0.0, 4.0)),
            AttributeSpec("gradeDigitalSystems", grade),
            AttributeSpec("gradeBasicProgramming", grade),
            AttributeSpec("skillAssembly", BooleanType()),
            AttributeSpec("skillProgramming", BooleanType()),
            AttributeSpec("skillInstrumentDesign", BooleanType()),
            AttributeSpec("quiz1", NumericType(0.0, 100.0)),
            AttributeSpec("midExam", NumericType(0.0, 100.0)),
            AttributeSpec("quiz2", NumericType(0.0, 100.0)),
            AttributeSpec("finalGrade", grade, 0.0, "solution"),
        ),
    )

"""Local and global similarity plus nearest-neighbor retrieval.

The global score of a stored case against a query is the weighted mean
of per-attribute similarities::

    score = sum(f(t_i, s_i) * w_i) / sum(w_i)

where ``i`` ranges only over attributes that are present in *both* the
query and the case and carry weight > 0. Attributes missing on either
side drop out of numerator and denominator alike, so partial queries
(a student known only up to the mid-exam, say) compare fairly against
fully documented cases instead of being penalized.

Per-attribute similarity ``f`` maps into [0, 1]:

* numeric: ``1 - |t - s| / (max - min)`` with the range taken from the
  schema, never from the data;
* grade: ``1 - |rank(t) - rank(s)| / (len(scale) - 1)``;
* boolean / categorical: exact match, 1 or 0.

Retrieval is a deterministic linear scan: score every case, sort by
score descending with ties broken by ascending case id, take the top k.
Case bases here are classroom-sized, so no index structure is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

from .errors import (
    CaseValidationError,
    EmptyCaseBaseError,
    GradecaseError,
    NoComparableAttributesError,
)
from .model import (
    AttributeSpec,
    BooleanType,
    Case,
    CaseSchema,
    CategoricalType,
    GradeType,
    NumericType,
    Query,
)

#: Number of neighbors shown by default.
DEFAULT_K = 5


@dataclass(frozen=True, order=True)
class RetrievalResult:
    """One ranked neighbor: the case and its similarity to the query."""

    case_id: str
    score: float
    case: Case

    def __str__(self):
        return f"{self.case_id}\t{self.score:.12g}"


def local_similarity(spec: AttributeSpec, t, s) -> float:
    """Similarity of two values of one attribute, in [0, 1].

    Symmetric in ``t`` and ``s``. Raises on text attributes (they are
    never compared; their weight is pinned to 0) and on values that do
    not conform to the attribute's type.
    """
    kind = spec.type
    if not kind.comparable:
        raise GradecaseError(
            f"attribute {spec.name!r} is text and has no similarity"
        )
    try:
        t = kind.conform(t)
        s = kind.conform(s)
    except ValueError as exc:
        raise CaseValidationError(f"attribute {spec.name!r}: {exc}") from None

    if isinstance(kind, NumericType):
        return 1.0 - abs(t - s) / kind.span
    if isinstance(kind, GradeType):
        if len(kind.scale) == 1:
            return 1.0
        return 1.0 - abs(kind.rank(t) - kind.rank(s)) / (len(kind.scale) - 1)
    if isinstance(kind, (BooleanType, CategoricalType)):
        return 1.0 if t == s else 0.0
    raise GradecaseError(f"attribute {spec.name!r}: unsupported type {kind.kind}")


def comparable_attributes(schema: CaseSchema, query: Query, case: Case) -> List[AttributeSpec]:
    """Attributes that actually enter the score for this query/case pair."""
    return [
        spec
        for spec in schema.attributes
        if spec.weight > 0.0
        and spec.name in query.values
        and spec.name in case.values
    ]


def global_similarity(schema: CaseSchema, query: Query, case: Case) -> float:
    """Weighted-mean similarity of ``case`` to ``query``, in [0, 1].

    Raises :class:`NoComparableAttributesError` when the query and the
    case share no attribute with weight > 0.
    """
    numerator = 0.0
    denominator = 0.0
    for spec in comparable_attributes(schema, query, case):
        local = local_similarity(spec, query.values[spec.name], case.values[spec.name])
        numerator += local * spec.weight
        denominator += spec.weight
    if denominator == 0.0:
        raise NoComparableAttributesError("no comparable attributes")
    return numerator / denominator


def rank_cases(cases: Iterable[Case], schema: CaseSchema, query: Query) -> List[RetrievalResult]:
    """Score and rank every case against the query, best first.

    Cases sharing no weighted attribute with the query cannot be scored
    and are left out of the ranking; if that holds for *every* case the
    incomparability is raised instead. Ties are broken by ascending case
    id so rankings are reproducible.
    """
    case_list = list(cases.cases) if hasattr(cases, "cases") else list(cases)
    if not case_list:
        raise EmptyCaseBaseError("empty case base")
    ranked = []
    for case in case_list:
        try:
            score = global_similarity(schema, query, case)
        except NoComparableAttributesError:
            continue
        ranked.append(RetrievalResult(case.id, score, case))
    if not ranked:
        raise NoComparableAttributesError(
            "no comparable attributes between the query and any stored case"
        )
    ranked.sort(key=lambda result: (-result.score, result.case_id))
    return ranked


def retrieve_k(cases, schema: CaseSchema, query: Query, k: int = DEFAULT_K) -> List[RetrievalResult]:
    """The k most similar cases, best first.

    ``cases`` may be a :class:`~gradecase.casebase.CaseBase` or any
    iterable of cases. Returns ``min(k, #scorable cases)`` results.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return rank_cases(cases, schema, query)[:k]

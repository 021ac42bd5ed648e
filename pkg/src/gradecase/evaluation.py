"""Formative evaluation: final-grade outlook and leave-one-out quality.

The outlook for a partially known student is read off the retrieved
neighborhood: tally the final grades of the k most similar labeled
cases, suggest the majority grade, and point out the best grade present
among the neighbors as the attainable upside. Feedback text additionally
names the not-yet-filled attributes on which the best-outcome neighbors
clearly outscored the rest - the levers the student can still pull.

Predictive quality over a whole case base is measured by leave-one-out:
hold out each labeled case, predict it from the remainder, and count
exact grade matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import (
    CaseValidationError,
    NoComparableAttributesError,
    NoLabeledNeighborsError,
    SchemaError,
)
from .model import (
    Case,
    CaseSchema,
    GradeType,
    NumericType,
    Query,
    make_query,
    query_from_case,
)
from .similarity import DEFAULT_K, RetrievalResult, rank_cases

#: "Markedly higher" on a numeric attribute: mean difference of at least
#: this many points per 100 points of schema range (10 points on 0-100).
NUMERIC_LEVER_THRESHOLD = 10.0
#: "Markedly higher" on a grade attribute: at least one scale step.
GRADE_LEVER_THRESHOLD = 1.0


def solution_grade_attribute(schema: CaseSchema) -> str:
    """The solution-group grade attribute predictions are made for."""
    for spec in schema.group_specs("solution"):
        if isinstance(spec.type, GradeType):
            return spec.name
    raise SchemaError(
        f"schema {schema.id!r} has no solution-group grade attribute to predict"
    )


@dataclass(frozen=True)
class GradeDistribution:
    """Final-grade tally over the consulted neighborhood."""

    counts: Dict[str, int]
    proportions: Dict[str, float]
    suggestion: str
    hint: str
    grade_attribute: str
    scale: tuple
    neighbors: Tuple[RetrievalResult, ...] = ()
    schema: Optional[CaseSchema] = field(default=None, repr=False, compare=False)

    @property
    def best_grade(self) -> str:
        """Best grade present among the neighbors (the attainable upside)."""
        ranks = {label: self.scale.index(label) for label in self.counts}
        return max(self.counts, key=lambda label: ranks[label])

    def to_document(self) -> dict:
        return {
            "counts": dict(self.counts),
            "proportions": dict(self.proportions),
            "suggestion": self.suggestion,
            "hint": self.hint,
            "gradeAttribute": self.grade_attribute,
            "neighbors": [
                {
                    "caseId": r.case_id,
                    "score": r.score,
                    "grade": r.case.values[self.grade_attribute],
                }
                for r in self.neighbors
            ],
        }


def predict_final_grade(cases, schema: CaseSchema, query: Query,
                        k: int = DEFAULT_K) -> GradeDistribution:
    """Outlook from the k nearest labeled neighbors.

    Neighbors without a final grade are skipped and the ranking is read
    further down instead, so partially labeled bases still yield k votes
    when possible. Vote ties break toward the better grade: formative
    feedback should not understate what is attainable.
    """
    grade_attr = solution_grade_attribute(schema)
    scale = schema.attribute(grade_attr).type.scale
    normalized = make_query(schema, query.values)

    ranked = rank_cases(cases, schema, normalized)
    neighbors = []
    for result in ranked:
        if grade_attr in result.case.values:
            neighbors.append(result)
        if len(neighbors) == k:
            break
    if not neighbors:
        raise NoLabeledNeighborsError(
            f"no labeled neighbors: no retrievable case carries {grade_attr!r}"
        )

    counts: Dict[str, int] = {}
    for result in neighbors:
        grade = result.case.values[grade_attr]
        counts[grade] = counts.get(grade, 0) + 1
    counts = {label: counts[label] for label in scale if label in counts}
    total = len(neighbors)
    proportions = {label: count / total for label, count in counts.items()}
    suggestion = max(counts, key=lambda label: (counts[label], scale.index(label)))

    best = max(counts, key=lambda label: scale.index(label))
    if best != suggestion:
        hint = (
            f"Similar students most often finished with {suggestion}, but some "
            f"reached {best}; there is still a chance to get {best}."
        )
    elif len(counts) == 1:
        hint = f"All {total} similar students finished with {suggestion}."
    else:
        hint = f"Similar students most often finished with {suggestion}."

    return GradeDistribution(
        counts=counts,
        proportions=proportions,
        suggestion=suggestion,
        hint=hint,
        grade_attribute=grade_attr,
        scale=tuple(scale),
        neighbors=tuple(neighbors),
        schema=schema,
    )


def _lever_attributes(dist: GradeDistribution, query: Query,
                      numeric_threshold: float,
                      grade_threshold: float) -> List[tuple]:
    """Open attributes where best-grade neighbors clearly outscored the rest.

    Returns (name, best_mean, other_mean) tuples in schema order. Only
    ordered attribute types (numeric, grade) can be "higher"; a group
    counts only when both sides have at least one value present.
    """
    schema = dist.schema
    best = dist.best_grade
    best_cases = [r.case for r in dist.neighbors
                  if r.case.values[dist.grade_attribute] == best]
    other_cases = [r.case for r in dist.neighbors
                   if r.case.values[dist.grade_attribute] != best]
    if not best_cases or not other_cases:
        return []

    levers = []
    for spec in schema.description_specs():
        if spec.name in query.values:
            continue

        def mean_of(cases: List[Case]):
            if isinstance(spec.type, NumericType):
                present = [c.values[spec.name] for c in cases if spec.name in c.values]
            elif isinstance(spec.type, GradeType):
                present = [spec.type.rank(c.values[spec.name])
                           for c in cases if spec.name in c.values]
            else:
                return None
            return sum(present) / len(present) if present else None

        best_mean = mean_of(best_cases)
        other_mean = mean_of(other_cases)
        if best_mean is None or other_mean is None:
            continue
        if isinstance(spec.type, NumericType):
            threshold = numeric_threshold / 100.0 * spec.type.span
        else:
            threshold = grade_threshold
        if best_mean - other_mean >= threshold:
            levers.append((spec.name, best_mean, other_mean))
    return levers


def generate_feedback(dist: GradeDistribution, query: Query,
                      numeric_threshold: float = NUMERIC_LEVER_THRESHOLD,
                      grade_threshold: float = GRADE_LEVER_THRESHOLD) -> str:
    """Deterministic formative feedback for one outlook.

    Names the majority outcome, the best attainable outcome, and which
    still-open attributes the best-outcome neighbors scored markedly
    higher on. Identical inputs always produce identical text.
    """
    total = sum(dist.counts.values())
    majority = dist.counts[dist.suggestion]
    lines = []
    if majority == total:
        lines.append(f"Likely final grade: {dist.suggestion} "
                     f"(all {total} similar students).")
    else:
        lines.append(f"Likely final grade: {dist.suggestion} "
                     f"({majority} of {total} similar students).")

    best = dist.best_grade
    if best != dist.suggestion:
        lines.append(f"Best outcome among similar students: {best}.")
        levers = _lever_attributes(dist, query, numeric_threshold, grade_threshold)
        if levers:
            parts = [
                f"{name} (their average {best_mean:g} vs {other_mean:g})"
                for name, best_mean, other_mean in levers
            ]
            lines.append(
                f"The {best} students scored markedly higher on: "
                + ", ".join(parts)
                + ". Doing well there keeps "
                + f"{best} within reach."
            )
    return "\n".join(lines)


@dataclass(frozen=True)
class LooReport:
    """Leave-one-out summary: exact-match accuracy plus the confusion table."""

    total: int
    exact_matches: int
    accuracy: float
    confusion: Dict[Tuple[str, str], int]

    def to_document(self) -> dict:
        table: Dict[str, Dict[str, int]] = {}
        for (actual, predicted), count in sorted(self.confusion.items()):
            table.setdefault(actual, {})[predicted] = count
        return {
            "total": self.total,
            "exactMatches": self.exact_matches,
            "accuracy": self.accuracy,
            "confusion": table,
        }


def leave_one_out(cases, schema: CaseSchema, k: int = DEFAULT_K) -> LooReport:
    """Hold out each labeled case, predict it from the rest, count matches.

    Labeled cases that offer no weighted description value cannot be
    turned into a query and are left out of the tally.
    """
    case_list = list(cases.cases) if hasattr(cases, "cases") else list(cases)
    grade_attr = solution_grade_attribute(schema)
    labeled = [case for case in case_list if grade_attr in case.values]
    if len(labeled) < 2:
        raise CaseValidationError(
            f"leave-one-out needs at least 2 cases with {grade_attr!r}, "
            f"found {len(labeled)}"
        )

    total = 0
    exact = 0
    confusion: Dict[Tuple[str, str], int] = {}
    for held_out in labeled:
        rest = [case for case in case_list if case.id != held_out.id]
        try:
            query = query_from_case(schema, held_out)
            dist = predict_final_grade(rest, schema, query, k)
        except (CaseValidationError, NoComparableAttributesError,
                NoLabeledNeighborsError):
            continue
        actual = held_out.values[grade_attr]
        predicted = dist.suggestion
        total += 1
        if predicted == actual:
            exact += 1
        confusion[(actual, predicted)] = confusion.get((actual, predicted), 0) + 1

    if total == 0:
        raise CaseValidationError("leave-one-out: no labeled case yields a usable query")
    return LooReport(total, exact, exact / total, confusion)

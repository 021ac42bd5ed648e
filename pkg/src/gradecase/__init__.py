"""gradecase: case-based grade outlooks for a classroom.

A small workbench that keeps solved student cases, retrieves the most
similar ones for a new query by weighted nearest neighbor, walks the
retrieve / reuse / revise / retain cycle, and turns a neighborhood into
a formative outlook: likely final grade, best outcome in reach, and
which open assessments separate the best students from the rest.
"""

from .casebase import (
    CaseBase,
    CaseBaseStore,
    load_case_base,
    make_case_base,
    retain_case,
    save_case_base,
)
from .engine import CycleEngine, Session, SessionState
from .errors import (
    CaseValidationError,
    EmptyCaseBaseError,
    GradecaseError,
    IllegalStateError,
    NoComparableAttributesError,
    NoLabeledNeighborsError,
    NotFoundError,
    ParseError,
    SchemaError,
    UnknownGradeError,
)
from .estimators import CaseRetriever, GradeOutlookClassifier
from .evaluation import (
    GradeDistribution,
    LooReport,
    generate_feedback,
    leave_one_out,
    predict_final_grade,
)
from .model import (
    AttributeSpec,
    Case,
    CaseSchema,
    Query,
    make_case,
    make_query,
    query_from_case,
    schema_from_document,
    schema_to_document,
    student_schema,
    validate_case,
)
from .similarity import (
    DEFAULT_K,
    RetrievalResult,
    global_similarity,
    local_similarity,
    rank_cases,
    retrieve_k,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSpec",
    "Case",
    "CaseBase",
    "CaseBaseStore",
    "CaseRetriever",
    "CaseSchema",
    "CaseValidationError",
    "CycleEngine",
    "DEFAULT_K",
    "EmptyCaseBaseError",
    "GradeDistribution",
    "GradeOutlookClassifier",
    "GradecaseError",
    "IllegalStateError",
    "LooReport",
    "NoComparableAttributesError",
    "NoLabeledNeighborsError",
    "NotFoundError",
    "ParseError",
    "Query",
    "RetrievalResult",
    "SchemaError",
    "Session",
    "SessionState",
    "UnknownGradeError",
    "generate_feedback",
    "global_similarity",
    "leave_one_out",
    "load_case_base",
    "local_similarity",
    "make_case",
    "make_case_base",
    "make_query",
    "predict_final_grade",
    "query_from_case",
    "rank_cases",
    "retain_case",
    "retrieve_k",
    "save_case_base",
    "schema_from_document",
    "schema_to_document",
    "student_schema",
    "validate_case",
]

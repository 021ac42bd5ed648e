"""Exception hierarchy shared across the workbench.

Every error the engine can raise maps to exactly one API error code, so
the service and CLI layers translate these mechanically instead of
pattern-matching messages.
"""

from __future__ import annotations


class GradecaseError(Exception):
    """Base class for all workbench errors."""


class SchemaError(GradecaseError):
    """A schema definition document violates the schema grammar."""


class ParseError(GradecaseError):
    """A case-base file (CSV/JSON) is malformed at the given location."""


class CaseValidationError(GradecaseError):
    """A case or query does not conform to its schema.

    Carries the individual violations so callers can render them
    field-by-field.
    """

    def __init__(self, message: str, violations: tuple = ()):
        super().__init__(message)
        self.violations = tuple(violations)


class UnknownGradeError(GradecaseError):
    """A grade label is not a member of the attribute's scale."""


class NoComparableAttributesError(GradecaseError):
    """Query and case share no attribute with weight > 0."""


class EmptyCaseBaseError(GradecaseError):
    """Retrieval was attempted against a case base with no cases."""


class NoLabeledNeighborsError(GradecaseError):
    """No retrievable neighbor carries a solution grade to vote with."""


class NotFoundError(GradecaseError):
    """A named resource (case, case base, schema, session) does not exist."""


class IllegalStateError(GradecaseError):
    """A session operation was attempted in a state that forbids it."""

"""Scikit-learn style estimators over the retrieval core.

These wrap the plain functions (:func:`~gradecase.similarity.retrieve_k`
and :func:`~gradecase.evaluation.predict_final_grade`) in the familiar
``fit`` / ``predict`` / ``get_params`` surface so the workbench composes
with the wider ecosystem: ``clone``, ``accuracy_score``, pipelines that
pass estimators around, and friends.

Unlike a feature-matrix estimator, ``fit`` takes the solved cases
themselves (labels live inside the cases as the solution attribute) and
the prediction inputs are queries: mappings of known description
attributes, which may be partial.
"""

from __future__ import annotations

from typing import Iterable, List, Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .casebase import make_case_base
from .evaluation import GradeDistribution, predict_final_grade, solution_grade_attribute
from .model import CaseSchema, Query, student_schema
from .similarity import DEFAULT_K, retrieve_k


def _as_query(values) -> Query:
    if isinstance(values, Query):
        return values
    return Query(dict(values))


def _as_cases(X) -> list:
    return list(X.cases) if hasattr(X, "cases") else list(X)


class CaseRetriever(BaseEstimator):
    """Weighted nearest-neighbor case retrieval with the estimator API.

    Parameters
    ----------
    schema : CaseSchema, optional
        Schema the cases and queries conform to. Defaults to the bundled
        student schema.
    k : int, default 5
        Number of neighbors returned per query.
    """

    def __init__(self, schema: Optional[CaseSchema] = None, k: int = DEFAULT_K):
        self.schema = schema
        self.k = k

    def _schema(self) -> CaseSchema:
        return self.schema if self.schema is not None else student_schema()

    def fit(self, X, y=None):
        """Validate and memorize the case base. ``X`` is a CaseBase or
        an iterable of cases; ``y`` is ignored (present for API
        compatibility)."""
        schema = self._schema()
        base = make_case_base(schema, _as_cases(X))
        self.cases_ = base.cases
        self.n_cases_ = len(base.cases)
        return self

    def kneighbors(self, X, k: Optional[int] = None) -> List[list]:
        """Ranked neighbors for each query in ``X``.

        Returns one list of :class:`~gradecase.similarity.RetrievalResult`
        per query, best first.
        """
        check_is_fitted(self, "cases_")
        schema = self._schema()
        k = self.k if k is None else k
        return [retrieve_k(self.cases_, schema, _as_query(q), k) for q in X]


class GradeOutlookClassifier(ClassifierMixin, BaseEstimator):
    """Final-grade prediction by neighborhood majority vote.

    ``predict`` suggests the majority grade of the k nearest labeled
    neighbors (ties toward the better grade); ``predict_proba`` exposes
    the vote proportions over ``classes_``; ``predict_outlook`` returns
    the full distribution for one query, including the consulted
    neighbors.
    """

    def __init__(self, schema: Optional[CaseSchema] = None, k: int = DEFAULT_K):
        self.schema = schema
        self.k = k

    def _schema(self) -> CaseSchema:
        return self.schema if self.schema is not None else student_schema()

    def fit(self, X, y=None):
        schema = self._schema()
        base = make_case_base(schema, _as_cases(X))
        grade_attr = solution_grade_attribute(schema)
        scale = schema.attribute(grade_attr).type.scale
        self.cases_ = base.cases
        self.grade_attribute_ = grade_attr
        self.classes_ = np.array(list(scale))
        return self

    def predict_outlook(self, values) -> GradeDistribution:
        """Full neighborhood outlook for a single query."""
        check_is_fitted(self, "cases_")
        return predict_final_grade(self.cases_, self._schema(), _as_query(values), self.k)

    def predict(self, X) -> np.ndarray:
        """Suggested grade per query, as an array of scale labels."""
        return np.array([self.predict_outlook(values).suggestion for values in X])

    def predict_proba(self, X) -> np.ndarray:
        """Neighborhood vote proportions per query, aligned to ``classes_``."""
        check_is_fitted(self, "cases_")
        rows = []
        for values in X:
            dist = self.predict_outlook(values)
            rows.append([dist.proportions.get(label, 0.0) for label in self.classes_])
        return np.array(rows)

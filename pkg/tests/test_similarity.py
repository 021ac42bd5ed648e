"""Similarity and retrieval tests, checked against the brute-force oracle."""

import random

import pytest
from hypothesis import given, strategies as st

from gradecase.errors import (
    CaseValidationError,
    EmptyCaseBaseError,
    GradecaseError,
    NoComparableAttributesError,
)
from gradecase.model import (
    AttributeSpec,
    BooleanType,
    Case,
    CaseSchema,
    GradeType,
    NumericType,
    Query,
    TextType,
    student_schema,
)
from gradecase.similarity import (
    global_similarity,
    local_similarity,
    rank_cases,
    retrieve_k,
)
from oracles import oracle_global, oracle_top_k
from randgen import random_case_base, random_query, random_schema

GPA = AttributeSpec("gpa", NumericType(0.0, 4.0), 0.5)
GRADE_DS = AttributeSpec("gradeDS", GradeType(), 0.5)
SKILL = AttributeSpec("skill", BooleanType(), 1.0)

TWO_ATTR_SCHEMA = CaseSchema("two", (GPA, GRADE_DS))
THREE_ATTR_SCHEMA = CaseSchema(
    "three", (GPA, GRADE_DS, AttributeSpec("quiz1", NumericType(0.0, 100.0), 1.0))
)


class TestLocalSimilarity:
    def test_numeric_hand_value(self):
        # 1 - |3.0 - 3.5| / (4 - 0)
        assert local_similarity(GPA, 3.0, 3.5) == 0.875

    def test_grade_one_step_apart(self):
        # 1 - 1/4 on the five-level scale
        assert local_similarity(GRADE_DS, "B", "A") == 0.75

    def test_boolean_match(self):
        assert local_similarity(SKILL, True, True) == 1.0
        assert local_similarity(SKILL, True, False) == 0.0

    def test_identity_for_every_type(self):
        assert local_similarity(GPA, 2.2, 2.2) == 1.0
        assert local_similarity(GRADE_DS, "C", "C") == 1.0
        assert local_similarity(SKILL, False, False) == 1.0

    def test_text_attribute_is_a_contract_violation(self):
        spec = AttributeSpec("id", TextType(), 0.0, "justification")
        with pytest.raises(GradecaseError, match="text"):
            local_similarity(spec, "a", "b")

    def test_nonconforming_value_names_attribute(self):
        with pytest.raises(CaseValidationError, match="'gpa'"):
            local_similarity(GPA, 9.9, 3.0)

    def test_single_level_scale_always_matches(self):
        spec = AttributeSpec("g", GradeType(("P",)), 1.0)
        assert local_similarity(spec, "P", "P") == 1.0

    @given(
        st.floats(min_value=0.0, max_value=4.0),
        st.floats(min_value=0.0, max_value=4.0),
    )
    def test_numeric_symmetric_and_in_range(self, a, b):
        left = local_similarity(GPA, a, b)
        right = local_similarity(GPA, b, a)
        assert left == right
        assert 0.0 <= left <= 1.0

    @given(st.sampled_from("EDCBA"), st.sampled_from("EDCBA"))
    def test_grade_symmetric_and_in_range(self, a, b):
        left = local_similarity(GRADE_DS, a, b)
        assert left == local_similarity(GRADE_DS, b, a)
        assert 0.0 <= left <= 1.0

    @given(st.floats(min_value=0.0, max_value=2.0), st.floats(min_value=0.0, max_value=2.0))
    def test_numeric_monotone_in_distance(self, d1, d2):
        base = 2.0
        s1 = local_similarity(GPA, base, base + d1)
        s2 = local_similarity(GPA, base, base + d2)
        if d1 < d2:
            assert s1 >= s2


class TestGlobalSimilarity:
    def test_hand_value_two_attributes(self):
        query = Query({"gpa": 3.0, "gradeDS": "B"})
        case = Case("S01", {"gpa": 3.5, "gradeDS": "A"})
        # (0.875 * 0.5 + 0.75 * 0.5) / 1.0
        assert global_similarity(TWO_ATTR_SCHEMA, query, case) == 0.8125

    def test_identity_on_agreeing_case(self):
        query = Query({"gpa": 3.0, "gradeDS": "B"})
        case = Case("S01", {"gpa": 3.0, "gradeDS": "B", "quiz1": 10.0})
        assert global_similarity(THREE_ATTR_SCHEMA, query, case) == 1.0

    def test_missing_attribute_renormalizes(self):
        # quiz1 (weight 1.0) absent from the query: same score as without it
        query = Query({"gpa": 3.0, "gradeDS": "B"})
        case = Case("S01", {"gpa": 3.5, "gradeDS": "A", "quiz1": 90.0})
        assert global_similarity(THREE_ATTR_SCHEMA, query, case) == 0.8125

    def test_missing_on_case_side_renormalizes_too(self):
        query = Query({"gpa": 3.0, "gradeDS": "B", "quiz1": 40.0})
        case = Case("S01", {"gpa": 3.5, "gradeDS": "A"})
        assert global_similarity(THREE_ATTR_SCHEMA, query, case) == 0.8125

    def test_no_comparable_attributes_raises(self):
        query = Query({"gpa": 3.0})
        case = Case("S01", {"gradeDS": "A"})
        with pytest.raises(NoComparableAttributesError, match="no comparable"):
            global_similarity(TWO_ATTR_SCHEMA, query, case)

    def test_zero_weight_attributes_never_count(self):
        schema = CaseSchema(
            "s",
            (GPA, AttributeSpec("quiz1", NumericType(0.0, 100.0), 0.0)),
        )
        query = Query({"gpa": 3.0, "quiz1": 0.0})
        case = Case("S01", {"gpa": 3.0, "quiz1": 100.0})
        assert global_similarity(schema, query, case) == 1.0

    def test_matches_oracle_on_random_inputs(self):
        rng = random.Random(20817)
        checked = 0
        for _ in range(300):
            schema = random_schema(rng)
            query = random_query(rng, schema)
            case = random_case_base(rng, schema, 1)[0]
            expected = oracle_global(schema, query.values, case.values)
            if expected is None:
                with pytest.raises(NoComparableAttributesError):
                    global_similarity(schema, query, case)
                continue
            got = global_similarity(schema, query, case)
            assert got == pytest.approx(expected, abs=1e-12)
            checked += 1
        assert checked > 150

    def test_uniform_weight_scaling_is_invariant(self):
        rng = random.Random(4211)
        for _ in range(100):
            schema = random_schema(rng)
            scaled = CaseSchema(
                schema.id,
                tuple(
                    AttributeSpec(s.name, s.type, min(s.weight * 0.25, 1.0), s.group)
                    for s in schema.attributes
                ),
            )
            query = random_query(rng, schema)
            case = random_case_base(rng, schema, 1)[0]
            try:
                base_score = global_similarity(schema, query, case)
            except NoComparableAttributesError:
                continue
            assert global_similarity(scaled, query, case) == pytest.approx(
                base_score, abs=1e-12
            )


class TestRetrieveK:
    def fixture_base(self):
        return [
            Case("S01", {"gpa": 3.0, "gradeDS": "B"}),
            Case("S02", {"gpa": 3.5, "gradeDS": "A"}),
            Case("S03", {"gpa": 1.0, "gradeDS": "E"}),
        ]

    def test_orders_by_score_and_keeps_all_when_k_exceeds_base(self):
        query = Query({"gpa": 3.0, "gradeDS": "B"})
        results = retrieve_k(self.fixture_base(), TWO_ATTR_SCHEMA, query, k=5)
        assert [r.case_id for r in results] == ["S01", "S02", "S03"]
        assert [r.score for r in results] == [1.0, 0.8125, 0.375]

    def test_identity_retrieval_with_k_one(self):
        query = Query({"gpa": 3.5, "gradeDS": "A"})
        results = retrieve_k(self.fixture_base(), TWO_ATTR_SCHEMA, query, k=1)
        assert len(results) == 1
        assert results[0].case_id == "S02"
        assert results[0].score == 1.0

    def test_ties_break_by_ascending_case_id(self):
        base = [
            Case("S02", {"gpa": 3.0}),
            Case("S01", {"gpa": 3.0}),
        ]
        schema = CaseSchema("one", (GPA,))
        results = retrieve_k(base, schema, Query({"gpa": 3.0}), k=2)
        assert [r.case_id for r in results] == ["S01", "S02"]
        assert results[0].score == results[1].score == 1.0

    def test_empty_base_is_an_error(self):
        with pytest.raises(EmptyCaseBaseError, match="empty case base"):
            retrieve_k([], TWO_ATTR_SCHEMA, Query({"gpa": 3.0}), k=1)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError, match="k must be >= 1"):
            retrieve_k(self.fixture_base(), TWO_ATTR_SCHEMA, Query({"gpa": 3.0}), k=0)

    def test_totally_incomparable_query_raises(self):
        base = [Case("S01", {"gradeDS": "A"})]
        with pytest.raises(NoComparableAttributesError):
            retrieve_k(base, TWO_ATTR_SCHEMA, Query({"gpa": 3.0}), k=1)

    def test_incomparable_cases_are_skipped_not_fatal(self):
        base = [
            Case("S01", {"gradeDS": "A"}),  # shares nothing with the query
            Case("S02", {"gpa": 2.0}),
        ]
        results = retrieve_k(base, TWO_ATTR_SCHEMA, Query({"gpa": 3.0}), k=5)
        assert [r.case_id for r in results] == ["S02"]

    def test_matches_full_sort_oracle_on_random_bases(self):
        rng = random.Random(90125)
        for _ in range(40):
            schema = random_schema(rng)
            base = random_case_base(rng, schema, rng.randint(1, 60))
            query = random_query(rng, schema)
            k = rng.randint(1, 10)
            expected = oracle_top_k(schema, query.values, base, k)
            try:
                got = retrieve_k(base, schema, query, k)
            except NoComparableAttributesError:
                assert expected == []
                continue
            assert [(r.case_id, r.score) for r in got] == expected

    def test_rank_cases_is_permutation_invariant(self):
        rng = random.Random(777)
        schema = random_schema(rng)
        base = random_case_base(rng, schema, 30)
        query = random_query(rng, schema)
        try:
            before = [(r.case_id, r.score) for r in rank_cases(base, schema, query)]
        except NoComparableAttributesError:
            pytest.skip("query incomparable for this seed")
        shuffled = base[:]
        rng.shuffle(shuffled)
        after = [(r.case_id, r.score) for r in rank_cases(shuffled, schema, query)]
        assert before == after

"""The bundled sample base must keep the walkthrough neighborhood stable."""

import pytest
from oracles import oracle_top_k

from gradecase.casebase import CaseBaseStore, load_case_base
from gradecase.datasets import (
    SAMPLE_BASE_ID,
    install_sample,
    load_sample_base,
    sample_data_path,
    scenario_query,
)
from gradecase.evaluation import generate_feedback, predict_final_grade
from gradecase.model import student_schema
from gradecase.similarity import rank_cases


@pytest.fixture(scope="module")
def base():
    return load_sample_base()


@pytest.fixture(scope="module")
def schema():
    return student_schema()


def test_thirty_students(base):
    assert len(base.cases) == 30
    assert base.schema_id == "student"


def test_known_gaps(base):
    assert "quiz2" not in base.get_case("S28").values
    assert "finalGrade" not in base.get_case("S29").values
    complete = [c for c in base.cases if c.id not in ("S28", "S29")]
    for case in complete:
        assert len(case.values) == 11


def test_scenario_neighborhood(base, schema):
    ranked = rank_cases(base, schema, scenario_query())
    top = ranked[:5]
    assert [r.case_id for r in top] == ["S03", "S17", "S14", "S21", "S09"]
    grades = sorted(r.case.values["finalGrade"] for r in top)
    assert grades == ["A", "B", "B", "B", "B"]
    # the neighborhood should not be one float wobble away from changing
    assert top[-1].score - ranked[5].score > 0.02


def test_scenario_neighborhood_agrees_with_oracle(base, schema):
    query = scenario_query()
    want = oracle_top_k(schema, query.values, base.cases, 5)
    got = [(r.case_id, r.score) for r in rank_cases(base, schema, query)[:5]]
    assert got == want


def test_scenario_outlook(base, schema):
    dist = predict_final_grade(base, schema, scenario_query(), k=5)
    assert dist.suggestion == "B"
    assert dist.proportions == {"B": 0.8, "A": 0.2}
    text = generate_feedback(dist, scenario_query())
    assert "quiz2" in text


def test_csv_twin_is_identical(base, schema):
    twin = load_case_base(sample_data_path("csv"), "csv", schema)
    assert twin == base


def test_install_sample_feeds_a_store(tmp_path, base):
    created = install_sample(tmp_path / "data")
    assert [p.name for p in created] == [
        f"{SAMPLE_BASE_ID}.json",
        f"{SAMPLE_BASE_ID}.csv",
    ]
    store = CaseBaseStore(tmp_path / "data")
    store.scan_directory()
    # both files describe the same base; whichever won the scan, the
    # cases must match the packaged ones
    assert store.get(SAMPLE_BASE_ID).cases == base.cases

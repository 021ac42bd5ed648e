"""Shared fixtures: a small student case base and store/engine wiring."""

import pytest

from gradecase.casebase import CaseBaseStore, make_case_base
from gradecase.model import make_case, student_schema

SCHEMA = student_schema()


def student_case(case_id, gpa, ds, bp, assembly, programming, instrument,
                 quiz1, mid_exam, quiz2=None, final=None):
    values = {
        "studentId": f"reg-{case_id}",
        "gpa": gpa,
        "gradeDigitalSystems": ds,
        "gradeBasicProgramming": bp,
        "skillAssembly": assembly,
        "skillProgramming": programming,
        "skillInstrumentDesign": instrument,
        "quiz1": quiz1,
        "midExam": mid_exam,
    }
    if quiz2 is not None:
        values["quiz2"] = quiz2
    if final is not None:
        values["finalGrade"] = final
    return make_case(SCHEMA, case_id, values)


def small_class():
    return make_case_base(
        SCHEMA,
        [
            student_case("S01", 3.4, "A", "A", True, True, False, 72, 75, 78, "A"),
            student_case("S02", 2.6, "C", "B", False, True, False, 55, 50, 52, "C"),
            student_case("S03", 3.0, "B", "B", True, False, True, 61, 64, 66, "B"),
            student_case("S04", 2.0, "D", "C", False, False, False, 40, 38, 45, "D"),
            student_case("S05", 3.8, "A", "A", True, True, True, 90, 88, 92, "A"),
            student_case("S06", 2.9, "B", "C", True, True, False, 58, 60, None, "B"),
        ],
    )


@pytest.fixture
def schema():
    return SCHEMA


@pytest.fixture
def store(tmp_path):
    store = CaseBaseStore(tmp_path)
    store.register("class", small_class(), persist=True)
    return store

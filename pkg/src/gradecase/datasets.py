"""Bundled sample data: one year of a microprocessor systems class.

Thirty students with prerequisite grades, practical skills and partial
assessment scores. Two rows are deliberately incomplete: S28 never took
quiz2 and S29 has no final grade yet. The same base ships as JSON and
CSV so both loaders have a realistic file to chew on.
"""

from __future__ import annotations

import shutil
import sys
from importlib.resources import as_file, files
from pathlib import Path

from .casebase import CaseBase, load_case_base
from .model import Query, make_query, student_schema

SAMPLE_BASE_ID = "microprocessor_students"


def sample_data_path(fmt: str = "json") -> Path:
    """Filesystem path of the bundled sample base ('json' or 'csv')."""
    resource = files("gradecase").joinpath("data", f"{SAMPLE_BASE_ID}.{fmt}")
    with as_file(resource) as path:
        return Path(path)


def load_sample_base() -> CaseBase:
    """The bundled 30-student case base, validated on load."""
    return load_case_base(sample_data_path("json"), "json", student_schema())


def scenario_query() -> Query:
    """The walkthrough query: a student with strong prerequisites who
    stumbled on quiz1 and the mid exam, asking what grade is in reach."""
    return make_query(
        student_schema(),
        {
            "gpa": 3.4,
            "gradeDigitalSystems": "A",
            "gradeBasicProgramming": "A",
            "skillAssembly": True,
            "skillProgramming": True,
            "skillInstrumentDesign": False,
            "quiz1": 40.0,
            "midExam": 45.0,
        },
    )


def install_sample(directory) -> list:
    """Copy the sample files into a directory (created if needed) so a
    service data dir can be seeded. Returns the created paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    created = []
    for fmt in ("json", "csv"):
        target = directory / f"{SAMPLE_BASE_ID}.{fmt}"
        shutil.copyfile(sample_data_path(fmt), target)
        created.append(target)
    return created


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit("usage: python3 -m gradecase.datasets <directory>")
    for path in install_sample(sys.argv[1]):
        print(f"wrote {path}")

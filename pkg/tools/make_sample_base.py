"""Regenerate the bundled sample case base.

The 30 students are hand-authored so that the walkthrough query (a
student with strong prerequisites but weak quiz1/midExam scores) has a
known, well-separated neighborhood: four B-graduates and one A-graduate
whose quiz2 score stands far above theirs. Run this after editing the
table; it refuses to write files if the designed neighborhood no longer
holds.

Usage: python3 tools/make_sample_base.py
"""

import sys
from pathlib import Path

from gradecase.casebase import make_case_base, save_case_base
from gradecase.model import Case, make_query, student_schema
from gradecase.similarity import rank_cases

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "gradecase" / "data"
BASENAME = "microprocessor_students"

# id, gpa, DS, BP, assembly, programming, instrument, quiz1, midExam, quiz2, final
ROWS = [
    ("S01", 3.8, "A", "A", True, True, True, 88, 90, 92, "A"),
    ("S02", 2.4, "C", "C", False, True, False, 48, 52, 55, "C"),
    ("S03", 3.3, "A", "A", True, True, False, 42, 48, 50, "B"),
    ("S04", 1.9, "D", "C", False, False, False, 35, 30, 28, "E"),
    ("S05", 3.1, "B", "A", True, True, False, 68, 72, 70, "B"),
    ("S06", 2.8, "B", "B", True, False, False, 60, 57, 62, "C"),
    ("S07", 3.9, "A", "A", True, True, True, 95, 92, 96, "A"),
    ("S08", 2.2, "C", "D", False, False, True, 42, 38, 40, "D"),
    ("S09", 3.5, "A", "B", True, True, False, 38, 42, 47, "B"),
    ("S10", 2.9, "B", "C", True, True, False, 55, 60, 58, "C"),
    ("S11", 3.6, "A", "A", True, True, True, 80, 85, 88, "A"),
    ("S12", 2.0, "D", "D", False, True, False, 30, 35, 33, "D"),
    ("S13", 3.2, "B", "B", True, False, True, 65, 60, 64, "B"),
    ("S14", 3.6, "A", "A", True, True, False, 35, 50, 45, "B"),
    ("S15", 2.6, "C", "B", False, True, False, 50, 45, 48, "C"),
    ("S16", 1.6, "E", "D", False, False, False, 25, 28, 30, "E"),
    ("S17", 3.5, "A", "A", True, True, False, 38, 40, 88, "A"),
    ("S18", 2.7, "B", "C", False, True, True, 58, 62, 60, "C"),
    ("S19", 3.0, "B", "B", True, True, False, 70, 68, 72, "B"),
    ("S20", 2.3, "C", "C", True, False, False, 45, 50, 42, "D"),
    ("S21", 3.0, "A", "A", True, True, False, 44, 50, 55, "B"),
    ("S22", 3.7, "A", "B", True, True, True, 85, 88, 90, "A"),
    ("S23", 2.5, "C", "B", True, True, False, 52, 48, 50, "C"),
    ("S24", 1.8, "D", "E", False, False, False, 20, 25, 22, "E"),
    ("S25", 3.4, "B", "A", True, True, False, 72, 75, 78, "B"),
    ("S26", 2.1, "C", "D", False, True, False, 38, 42, 36, "D"),
    ("S27", 3.3, "A", "B", True, False, False, 62, 66, 68, "B"),
    ("S28", 2.9, "B", "B", False, False, False, 55, 52, None, "C"),
    ("S29", 3.1, "B", "A", True, True, False, 58, 60, 62, None),
    ("S30", 2.6, "C", "C", True, True, False, 47, 44, 46, "C"),
]

# The walkthrough query: solid prerequisites, a stumble on the first
# two assessments, quiz2 still ahead.
SCENARIO_VALUES = {
    "gpa": 3.4,
    "gradeDigitalSystems": "A",
    "gradeBasicProgramming": "A",
    "skillAssembly": True,
    "skillProgramming": True,
    "skillInstrumentDesign": False,
    "quiz1": 40.0,
    "midExam": 45.0,
}

EXPECTED_TOP5 = ["S03", "S17", "S14", "S21", "S09"]
MIN_GAP = 0.02  # between ranks 5 and 6, so the neighborhood is not fragile


def build_cases():
    cases = []
    for row in ROWS:
        cid, gpa, ds, bp, asm, prog, instr, q1, mid, q2, final = row
        values = {
            "studentId": f"14-{cid[1:]:0>3}",
            "gpa": float(gpa),
            "gradeDigitalSystems": ds,
            "gradeBasicProgramming": bp,
            "skillAssembly": asm,
            "skillProgramming": prog,
            "skillInstrumentDesign": instr,
            "quiz1": float(q1),
            "midExam": float(mid),
        }
        if q2 is not None:
            values["quiz2"] = float(q2)
        if final is not None:
            values["finalGrade"] = final
        cases.append(Case(cid, values))
    return cases


def check(base, schema):
    query = make_query(schema, SCENARIO_VALUES)
    ranked = rank_cases(base, schema, query)
    top = ranked[:5]
    got = [r.case_id for r in top]
    if got != EXPECTED_TOP5:
        sys.exit(f"neighborhood drifted: top 5 is {got}, wanted {EXPECTED_TOP5}")
    grades = [r.case.values.get("finalGrade") for r in top]
    if sorted(grades) != ["A", "B", "B", "B", "B"]:
        sys.exit(f"neighborhood grades drifted: {grades}")
    gap = top[-1].score - ranked[5].score
    if gap < MIN_GAP:
        sys.exit(
            f"rank 5/6 gap {gap:.4f} below {MIN_GAP}; "
            f"rank 6 is {ranked[5].case_id} at {ranked[5].score:.6f}"
        )
    # background rows must answer every query attribute, otherwise a
    # sparse case could ride the renormalization into the top 5
    for case in base.cases:
        missing = [n for n in SCENARIO_VALUES if n not in case.values]
        if missing:
            sys.exit(f"case {case.id} is missing query attributes {missing}")
    for rank, result in enumerate(ranked[:6], start=1):
        grade = result.case.values.get("finalGrade", "-")
        print(f"  #{rank} {result.case_id} {grade} {result.score:.6f}")


def main():
    schema = student_schema()
    base = make_case_base(schema, build_cases())
    check(base, schema)
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for fmt in ("json", "csv"):
        path = DATA_DIR / f"{BASENAME}.{fmt}"
        save_case_base(base, path, fmt, schema)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

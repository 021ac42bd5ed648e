"""Exit codes, output channels, and agreement with the service."""

import json
import shutil

import pytest
from fastapi.testclient import TestClient

from gradecase.cli import main
from gradecase.datasets import sample_data_path, scenario_query
from gradecase.model import schema_to_document, student_schema
from gradecase.service import ServiceConfig, create_app

SCENARIO_SHORTHAND = (
    "gpa=3.4,gradeDigitalSystems=A,gradeBasicProgramming=A,"
    "skillAssembly=true,skillProgramming=true,skillInstrumentDesign=false,"
    "quiz1=40,midExam=45"
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def base_json(tmp_path):
    target = tmp_path / "class.json"
    shutil.copyfile(sample_data_path("json"), target)
    return str(target)


class TestSchemaCommands:
    def test_show_builtin_student(self, capsys):
        code, out, err = run(capsys, "schema", "show", "--builtin", "student")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "schema: student"
        assert len(lines) == 12  # header + 11 attributes
        assert any("gpa" in line and "numeric [0, 4]" in line for line in lines)

    def test_show_json(self, capsys):
        code, out, _ = run(capsys, "schema", "show", "--builtin", "student",
                           "--json")
        assert code == 0
        assert json.loads(out) == schema_to_document(student_schema())

    def test_show_unknown_builtin_is_usage_error(self, capsys):
        code, _, err = run(capsys, "schema", "show", "--builtin", "zebra")
        assert code == 2
        assert "unknown builtin" in err

    def test_validate_good_schema(self, capsys, tmp_path):
        doc = schema_to_document(student_schema())
        path = tmp_path / "student.schema.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "schema", "validate", str(path))
        assert code == 0
        assert "ok: schema 'student' with 11 attributes" in out

    def test_validate_bad_schema_exits_1(self, capsys, tmp_path):
        path = tmp_path / "bad.schema.json"
        path.write_text(json.dumps({"id": "bad", "attributes": []}))
        code, out, err = run(capsys, "schema", "validate", str(path))
        assert code == 1
        assert out == ""
        assert "error:" in err

    def test_validate_missing_file_exits_3(self, capsys, tmp_path):
        code, _, err = run(capsys, "schema", "validate",
                           str(tmp_path / "nope.json"))
        assert code == 3


class TestCasebaseCommands:
    def test_import_reproduces_canonical_json(self, capsys, tmp_path):
        out_path = tmp_path / "imported.json"
        code, out, _ = run(capsys, "casebase", "import",
                           str(sample_data_path("csv")), "-o", str(out_path))
        assert code == 0
        assert "30 cases" in out
        assert out_path.read_bytes() == sample_data_path("json").read_bytes()

    def test_list_human(self, capsys, base_json):
        code, out, _ = run(capsys, "casebase", "list", base_json)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 30
        assert lines[0].startswith("S01: studentId=14-001 gpa=3.8")

    def test_list_json(self, capsys, base_json):
        code, out, _ = run(capsys, "casebase", "list", base_json, "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["schemaId"] == "student"
        assert len(doc["cases"]) == 30


class TestRetrieve:
    def test_table_is_ranked(self, capsys, base_json):
        code, out, _ = run(capsys, "retrieve", base_json,
                           "--query", SCENARIO_SHORTHAND, "-k", "5")
        assert code == 0
        rows = [line.split() for line in out.strip().splitlines()]
        assert len(rows) == 5
        assert [r[1] for r in rows] == ["S03", "S17", "S14", "S21", "S09"]
        scores = [float(r[2]) for r in rows]
        assert scores == sorted(scores, reverse=True)

    def test_json_matches_library(self, capsys, base_json):
        from gradecase.casebase import load_case_base
        from gradecase.similarity import retrieve_k

        code, out, _ = run(capsys, "retrieve", base_json,
                           "--query", SCENARIO_SHORTHAND, "-k", "5", "--json")
        assert code == 0
        got = json.loads(out)["results"]
        schema = student_schema()
        base = load_case_base(sample_data_path("json"), "json", schema)
        want = retrieve_k(base, schema, scenario_query(), 5)
        assert [(r["caseId"], r["score"]) for r in got] == \
            [(r.case_id, r.score) for r in want]

    def test_json_query_escape_hatch(self, capsys, base_json):
        code, out, _ = run(capsys, "retrieve", base_json,
                           "--query", '{"gpa": 3.4, "quiz1": 40.0}', "-k", "3")
        assert code == 0
        assert len(out.strip().splitlines()) == 3

    def test_shorthand_parses_by_type(self, capsys, base_json):
        # lowercase grade letter and yes/no boolean both go through
        code, out, _ = run(capsys, "retrieve", base_json, "--query",
                           "gradeDigitalSystems=a,skillAssembly=yes", "-k", "1")
        assert code == 0

    def test_empty_base_exits_1(self, capsys, tmp_path):
        empty = tmp_path / "empty.json"
        empty.write_text(json.dumps({"schemaId": "student", "cases": []}))
        code, out, err = run(capsys, "retrieve", str(empty),
                             "--query", "gpa=3.0")
        assert code == 1
        assert "empty case base" in err

    def test_unknown_attribute_exits_1(self, capsys, base_json):
        code, _, err = run(capsys, "retrieve", base_json,
                           "--query", "shoeSize=42")
        assert code == 1
        assert "unknown attribute" in err

    def test_bad_number_exits_1(self, capsys, base_json):
        code, _, err = run(capsys, "retrieve", base_json,
                           "--query", "gpa=three")
        assert code == 1
        assert "expected a number" in err

    def test_unknown_flag_exits_2(self, capsys, base_json):
        code, _, err = run(capsys, "retrieve", base_json,
                           "--query", "gpa=3.0", "--frobnicate")
        assert code == 2

    def test_missing_file_exits_3(self, capsys, tmp_path):
        code, _, _ = run(capsys, "retrieve", str(tmp_path / "gone.json"),
                         "--query", "gpa=3.0")
        assert code == 3


class TestPredictAndEvaluate:
    def test_predict_human(self, capsys, base_json):
        code, out, _ = run(capsys, "predict", base_json,
                           "--query", SCENARIO_SHORTHAND)
        assert code == 0
        assert "Likely final grade: B" in out
        assert "quiz2" in out

    def test_predict_json(self, capsys, base_json):
        code, out, _ = run(capsys, "predict", base_json,
                           "--query", SCENARIO_SHORTHAND, "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["suggestion"] == "B"
        assert doc["proportions"] == {"B": 0.8, "A": 0.2}
        assert "quiz2" in doc["feedback"]

    def test_evaluate_prints_json(self, capsys, base_json):
        code, out, _ = run(capsys, "evaluate", base_json, "-k", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["total"] == 29
        assert 0.0 <= doc["accuracy"] <= 1.0


class TestServeWiring:
    def test_flags_build_the_config(self, capsys, tmp_path, monkeypatch):
        captured = {}
        monkeypatch.setattr("gradecase.service.serve",
                            lambda config: captured.update(config=config))
        code, _, _ = run(capsys, "serve", "--data", str(tmp_path),
                         "--port", "9001", "--k", "7", "--token", "shh")
        assert code == 0
        config = captured["config"]
        assert config.port == 9001
        assert config.default_k == 7
        assert config.auth_token == "shh"
        assert config.data_dir == tmp_path

    def test_env_var_supplies_data_dir(self, capsys, tmp_path, monkeypatch):
        captured = {}
        monkeypatch.setattr("gradecase.service.serve",
                            lambda config: captured.update(config=config))
        monkeypatch.setenv("CASEBASE_DATA", str(tmp_path))
        code, _, _ = run(capsys, "serve")
        assert code == 0
        assert captured["config"].data_dir == tmp_path

    def test_missing_data_dir_is_usage_error(self, capsys, monkeypatch):
        monkeypatch.delenv("CASEBASE_DATA", raising=False)
        code, _, err = run(capsys, "serve")
        assert code == 2


class TestCliServiceAgreement:
    def test_retrieval_identical_across_boundaries(self, capsys, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        shutil.copyfile(sample_data_path("json"), data_dir / "class.json")

        code, out, _ = run(capsys, "retrieve", str(data_dir / "class.json"),
                           "--query", SCENARIO_SHORTHAND, "-k", "5", "--json")
        assert code == 0
        cli_results = [(r["caseId"], r["score"])
                       for r in json.loads(out)["results"]]

        with TestClient(create_app(ServiceConfig(data_dir=data_dir))) as client:
            sid = client.post("/sessions",
                              json={"caseBaseId": "class"}).json()["id"]
            view = client.post(
                f"/sessions/{sid}/query",
                json={"values": dict(scenario_query().values), "k": 5},
            ).json()
        api_results = [(r["caseId"], r["score"]) for r in view["results"]]
        assert cli_results == api_results

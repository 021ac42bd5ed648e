"""JSON-over-HTTP boundary in front of the store and the cycle engine.

Every route is a thin translation layer: decode the request, call the
one engine or store function it maps to, encode the result. All domain
rules live below this module, which is what makes CLI and API behavior
interchangeable.

Error bodies follow one shape, ``{"code", "message", "detail?"}``, with
the code fixed per error class:

========================== ===================== ======
raised                     code                  status
========================== ===================== ======
ParseError, SchemaError    bad_request           400
NotFoundError              not_found             404
IllegalStateError          illegal_state         409
CaseValidationError et al. validation_failed     422
OSError                    io_error              500
========================== ===================== ======

Scores ride through ``json`` float serialization (repr round-trip), so
responses carry them at full precision, not a rounded rendering.
"""

from __future__ import annotations

import json
import re
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .casebase import CaseBaseStore, case_base_from_document, read_csv_case_base
from .engine import CycleEngine, Session
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
from .evaluation import generate_feedback, leave_one_out, predict_final_grade
from .model import make_query, schema_to_document
from .similarity import DEFAULT_K

DEFAULT_SESSION_TIMEOUT = 30 * 60.0

# order matters: subclasses before GradecaseError itself
ERROR_MAP = [
    (IllegalStateError, 409, "illegal_state"),
    (NotFoundError, 404, "not_found"),
    (CaseValidationError, 422, "validation_failed"),
    (UnknownGradeError, 422, "validation_failed"),
    (NoComparableAttributesError, 422, "validation_failed"),
    (EmptyCaseBaseError, 422, "validation_failed"),
    (NoLabeledNeighborsError, 422, "validation_failed"),
    (SchemaError, 400, "bad_request"),
    (ParseError, 400, "bad_request"),
    (GradecaseError, 400, "bad_request"),
]

_BASE_ID = re.compile(r"[A-Za-z0-9_-]+")


@dataclass
class ServiceConfig:
    """Everything `serve` needs; the CLI fills this from flags/env."""

    data_dir: Path
    host: str = "127.0.0.1"
    port: int = 8000
    default_k: int = DEFAULT_K
    session_timeout: float = DEFAULT_SESSION_TIMEOUT
    auth_token: Optional[str] = None
    ui_dir: Optional[Path] = None


class SessionCreate(BaseModel):
    caseBaseId: str


class QueryRequest(BaseModel):
    values: Dict[str, Any]
    k: Optional[int] = Field(default=None, ge=1)


class ChooseRequest(BaseModel):
    caseId: str


class ReviseRequest(BaseModel):
    edits: Dict[str, Any]


class RetainRequest(BaseModel):
    newId: str


class EvaluateRequest(BaseModel):
    k: Optional[int] = Field(default=None, ge=1)


def _error_body(code: str, message: str, detail=None) -> dict:
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return body


def _case_view(case) -> dict:
    return {"id": case.id, "values": dict(case.values)}


def _result_view(result) -> dict:
    return {"caseId": result.case_id, "score": result.score,
            "values": dict(result.case.values)}


def _session_view(session: Session) -> dict:
    return {
        "id": session.id,
        "caseBaseId": session.case_base_id,
        "state": session.state.value,
        "query": dict(session.query.values) if session.query is not None else None,
        "results": None if session.results is None
        else [_result_view(r) for r in session.results],
        "workingCase": None if session.working_case is None
        else _case_view(session.working_case),
        "retainedId": session.retained_id,
    }


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the application; fails fast on an unusable data directory."""
    data_dir = Path(config.data_dir)
    if not data_dir.is_dir():
        raise FileNotFoundError(f"data directory {data_dir} is not a directory")

    store = CaseBaseStore(data_dir)
    store.scan_directory()
    engine = CycleEngine(store, idle_timeout=config.session_timeout)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        engine.close_all()

    app = FastAPI(title="gradecase", lifespan=lifespan)
    app.state.store = store
    app.state.engine = engine
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    session_locks: Dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def _session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    # -- error translation

    @app.exception_handler(GradecaseError)
    async def handle_domain_error(request: Request, exc: GradecaseError):
        for klass, status, code in ERROR_MAP:
            if isinstance(exc, klass):
                detail = None
                if isinstance(exc, CaseValidationError) and exc.violations:
                    detail = [{"attribute": v.attribute, "message": v.message}
                              for v in exc.violations]
                return JSONResponse(_error_body(code, str(exc), detail),
                                    status_code=status)
        raise exc  # unreachable: GradecaseError is in the map

    @app.exception_handler(OSError)
    async def handle_io_error(request: Request, exc: OSError):
        return JSONResponse(_error_body("io_error", str(exc)), status_code=500)

    @app.exception_handler(RequestValidationError)
    async def handle_bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            _error_body("bad_request", "malformed request", exc.errors()),
            status_code=400,
        )

    if config.auth_token is not None:
        expected = f"Bearer {config.auth_token}"

        @app.middleware("http")
        async def require_token(request: Request, call_next):
            if request.url.path != "/health":
                if request.headers.get("authorization") != expected:
                    return JSONResponse(
                        _error_body("bad_request", "missing or invalid bearer token"),
                        status_code=401,
                    )
            return await call_next(request)

    # -- liveness

    @app.get("/health")
    def health():
        return {"status": "ok"}

    # -- schemas

    @app.get("/schemas")
    def list_schemas():
        return [schema_to_document(store.get_schema(sid))
                for sid in store.schema_ids()]

    @app.get("/schemas/{schema_id}")
    def get_schema(schema_id: str):
        return schema_to_document(store.get_schema(schema_id))

    # -- case bases

    def _base_summary(base_id: str) -> dict:
        base = store.get(base_id)
        return {"id": base_id, "schemaId": base.schema_id,
                "caseCount": len(base.cases)}

    @app.get("/casebases")
    def list_casebases():
        return [_base_summary(base_id) for base_id in store.ids()]

    @app.post("/casebases", status_code=201)
    async def create_casebase(request: Request, id: str, schema: str = "student"):
        if not _BASE_ID.fullmatch(id):
            raise ParseError("case base id must match [A-Za-z0-9_-]+")
        content_type = (request.headers.get("content-type") or "").lower()
        if "csv" in content_type:
            fmt = "csv"
        elif "json" in content_type:
            fmt = "json"
        else:
            raise ParseError(
                f"cannot infer case base format from content type {content_type!r}"
            )
        try:
            text = (await request.body()).decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError("case base upload is not valid UTF-8") from None
        if fmt == "json":
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON upload: {exc}") from None
            if not isinstance(doc, dict) or "schemaId" not in doc:
                raise ParseError("upload is not a case base document")
            base = case_base_from_document(doc, store.get_schema(doc["schemaId"]))
        else:
            base = read_csv_case_base(text.splitlines(), store.get_schema(schema))
        store.register(id, base, fmt=fmt, persist=True)
        return _base_summary(id)

    @app.get("/casebases/{base_id}")
    def get_casebase(base_id: str):
        return _base_summary(base_id)

    @app.get("/casebases/{base_id}/cases")
    def list_cases(base_id: str):
        base = store.get(base_id)
        return {"cases": [_case_view(c) for c in base.cases]}

    @app.get("/casebases/{base_id}/cases/{case_id}")
    def get_case(base_id: str, case_id: str):
        return _case_view(store.get(base_id).get_case(case_id))

    # -- evaluation

    @app.post("/casebases/{base_id}/predict")
    def predict(base_id: str, body: QueryRequest):
        base = store.get(base_id)
        schema = store.schema_for(base_id)
        query = make_query(schema, body.values)
        k = body.k if body.k is not None else config.default_k
        dist = predict_final_grade(base, schema, query, k)
        document = dist.to_document()
        document["feedback"] = generate_feedback(dist, query)
        return document

    @app.post("/casebases/{base_id}/evaluate")
    def evaluate(base_id: str, body: Optional[EvaluateRequest] = None):
        base = store.get(base_id)
        schema = store.schema_for(base_id)
        k = config.default_k
        if body is not None and body.k is not None:
            k = body.k
        return leave_one_out(base, schema, k).to_document()

    # -- sessions

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate):
        return _session_view(engine.start_session(body.caseBaseId))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(engine.get(session_id))

    @app.post("/sessions/{session_id}/query")
    def submit_query(session_id: str, body: QueryRequest):
        with _session_lock(session_id):
            session = engine.get(session_id)
            query = make_query(session.schema, body.values)
            k = body.k if body.k is not None else config.default_k
            return _session_view(engine.submit_query(session, query, k))

    @app.post("/sessions/{session_id}/choose")
    def choose_case(session_id: str, body: ChooseRequest):
        with _session_lock(session_id):
            session = engine.get(session_id)
            return _session_view(engine.choose_case(session, body.caseId))

    @app.post("/sessions/{session_id}/revise")
    def revise(session_id: str, body: ReviseRequest):
        with _session_lock(session_id):
            session = engine.get(session_id)
            return _session_view(engine.revise(session, body.edits))

    @app.post("/sessions/{session_id}/retain")
    def retain(session_id: str, body: RetainRequest):
        with _session_lock(session_id):
            session = engine.get(session_id)
            return _session_view(engine.retain(session, body.newId))

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str):
        with _session_lock(session_id):
            session = engine.get(session_id)
            engine.close_session(session)
        with locks_guard:
            session_locks.pop(session_id, None)
        return {"id": session_id, "state": session.state.value}

    if config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig) -> None:
    """Run until interrupted; shutdown closes (and so flushes) sessions."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)

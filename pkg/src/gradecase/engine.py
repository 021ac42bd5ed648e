"""The Retrieve-Reuse-Revise-Retain session state machine.

A session walks one new case through the cycle against a named case
base. It binds a read snapshot when it starts (stable result lists for
the user mid-session) while retains go to the live base through the
store, so nothing retained is ever lost. Closing a session flushes the
base to disk when a retain happened.

Legal transitions::

    Created ──query──> Retrieved ──choose──> Chosen ──revise──> Revised
       │                  │  ^ re-query         │    <──revise──┘   │
       │                  │                     └──retain──┬─retain─┘
       └─────close────────┴──────────close──────────> Retained ──close──> Closed

Every other (state, operation) pair is rejected with an
:class:`~gradecase.errors.IllegalStateError`; a closed session accepts
nothing at all.
"""

from __future__ import annotations

import enum
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .casebase import CaseBase, CaseBaseStore
from .errors import CaseValidationError, IllegalStateError, NotFoundError
from .model import Case, CaseSchema, Query, Violation, make_query, validate_case
from .similarity import DEFAULT_K, RetrievalResult, retrieve_k


class SessionState(str, enum.Enum):
    CREATED = "Created"
    RETRIEVED = "Retrieved"
    CHOSEN = "Chosen"
    REVISED = "Revised"
    RETAINED = "Retained"
    CLOSED = "Closed"


@dataclass
class Session:
    """One 4R cycle in progress."""

    id: str
    case_base_id: str
    snapshot: CaseBase
    schema: CaseSchema
    state: SessionState = SessionState.CREATED
    query: Optional[Query] = None
    results: Optional[List[RetrievalResult]] = None
    working_case: Optional[Case] = None
    retained_id: Optional[str] = None
    did_retain: bool = field(default=False, repr=False)
    touched_at: float = field(default_factory=time.monotonic, repr=False)


def _require(session: Session, operation: str, *allowed: SessionState) -> None:
    if session.state not in allowed:
        raise IllegalStateError(
            f"cannot {operation} in state {session.state.value}"
            f" (allowed: {', '.join(s.value for s in allowed)})"
        )


class CycleEngine:
    """Runs sessions against a :class:`CaseBaseStore`.

    Operations on one session are expected to be externally serialized
    (one user drives one session); sessions on different bases or the
    same base may run concurrently, with retains serialized by the
    store's per-base writer lock.
    """

    def __init__(self, store: CaseBaseStore, idle_timeout: Optional[float] = None):
        self.store = store
        self.idle_timeout = idle_timeout
        self._sessions: Dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- registry

    def get(self, session_id: str) -> Session:
        self.expire_idle()
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def open_sessions(self) -> List[Session]:
        return [s for s in self._sessions.values() if s.state is not SessionState.CLOSED]

    def expire_idle(self) -> None:
        """Close and drop sessions idle past the timeout (lazy sweep)."""
        if self.idle_timeout is None:
            return
        now = time.monotonic()
        with self._lock:
            stale = [
                s for s in self._sessions.values()
                if now - s.touched_at > self.idle_timeout
            ]
            for session in stale:
                if session.state is not SessionState.CLOSED:
                    self._close(session)
                del self._sessions[session.id]

    # -- the 4R cycle

    def start_session(self, case_base_id: str) -> Session:
        """Precycle: resolve the case base and bind a snapshot."""
        snapshot = self.store.get(case_base_id)
        schema = self.store.schema_for(case_base_id)
        session = Session(uuid.uuid4().hex, case_base_id, snapshot, schema)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def submit_query(self, session: Session, query: Query, k: int = DEFAULT_K) -> Session:
        """Retrieve: rank the snapshot against the query."""
        _require(session, "submit a query", SessionState.CREATED, SessionState.RETRIEVED)
        normalized = make_query(session.schema, query.values)
        session.results = retrieve_k(session.snapshot, session.schema, normalized, k)
        session.query = normalized
        session.state = SessionState.RETRIEVED
        session.touched_at = time.monotonic()
        return session

    def choose_case(self, session: Session, case_id: str) -> Session:
        """Reuse: copy the chosen case, overlaying the query's known facts.

        The query's values win over the reused case's values; the new
        student's facts must survive the reuse.
        """
        _require(session, "choose a case", SessionState.RETRIEVED)
        chosen = next((r.case for r in session.results if r.case_id == case_id), None)
        if chosen is None:
            raise CaseValidationError(
                f"case {case_id!r} is not among the retrieved results"
            )
        values = dict(chosen.values)
        values.update(session.query.values)
        session.working_case = Case(chosen.id, values)
        session.state = SessionState.CHOSEN
        session.touched_at = time.monotonic()
        return session

    def revise(self, session: Session, edits: dict) -> Session:
        """Revise: apply edits to the working case, atomically.

        ``None`` as an edit value clears the attribute. An edit set that
        fails validation leaves the working case untouched.
        """
        _require(session, "revise", SessionState.CHOSEN, SessionState.REVISED)
        values = dict(session.working_case.values)
        cleared = []
        for name, value in edits.items():
            if value is None:
                values.pop(name, None)
                cleared.append(name)
            else:
                values[name] = value
        candidate = Case(session.working_case.id, values)
        violations = validate_case(session.schema, candidate)
        violations += [
            Violation(name, "unknown attribute")
            for name in cleared
            if name not in session.schema.names
        ]
        if violations:
            raise CaseValidationError(
                "; ".join(str(v) for v in violations), tuple(violations)
            )
        session.working_case = Case(
            candidate.id,
            {n: session.schema.attribute(n).type.conform(v) for n, v in values.items()},
        )
        session.state = SessionState.REVISED
        session.touched_at = time.monotonic()
        return session

    def retain(self, session: Session, new_id: str) -> Session:
        """Retain: store the working case under ``new_id`` in the live base.

        An existing id replaces that case; a fresh id appends.
        """
        _require(session, "retain", SessionState.CHOSEN, SessionState.REVISED)
        if not new_id:
            raise CaseValidationError("retain needs a non-empty case id")
        retained = Case(new_id, dict(session.working_case.values))
        self.store.retain(session.case_base_id, retained)
        session.working_case = retained
        session.retained_id = new_id
        session.did_retain = True
        session.state = SessionState.RETAINED
        session.touched_at = time.monotonic()
        return session

    def close_session(self, session: Session) -> None:
        """Postcycle: flush the base to disk if this session retained."""
        if session.state is SessionState.CLOSED:
            raise IllegalStateError("session is already closed")
        self._close(session)

    def _close(self, session: Session) -> None:
        if session.did_retain:
            self.store.flush(session.case_base_id)
        session.state = SessionState.CLOSED

    def close_all(self) -> None:
        """Close every open session (service shutdown path)."""
        for session in self.open_sessions():
            self._close(session)

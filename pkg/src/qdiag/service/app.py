"""HTTP session service: one state machine per diagnosis session.

Sessions live in process memory.  Requests against the same session are
serialized by a per-session lock, so the created -> querying ->
awaiting-answer -> (querying | converged) transitions can never interleave
into a corrupt state.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from ..diagnosis import Diagnosis, diag_key
from ..dpi import DPIError, load_dpi
from ..logic import FormulaSyntaxError
from ..qspace import QPartition, Query
from ..session import (
    HistoryEntry,
    QueryScores,
    SessionConfig,
    SessionState,
    StaleQueryError,
    apply_answer,
    new_session,
    next_query,
)
from .models import (
    AnswerRequest,
    CreateSessionRequest,
    DiagnosisModel,
    HistoryEntryModel,
    HistoryModel,
    PartitionModel,
    PendingQueryModel,
    QueryModel,
    ScoresModel,
    SessionView,
)

__all__ = ["create_app", "serve_api", "SessionStore"]


def _diag_id(diagnosis: Diagnosis) -> str:
    return "+".join(diag_key(diagnosis))


def _diagnosis_models(state_diagnoses) -> list[DiagnosisModel]:
    return [
        DiagnosisModel(
            id=_diag_id(d),
            components=list(diag_key(d)),
            probability=state_diagnoses.probability(d),
        )
        for d in sorted(state_diagnoses, key=diag_key)
    ]


def _partition_model(p: QPartition) -> PartitionModel:
    return PartitionModel(
        dplus=[_diag_id(d) for d in p.dplus],
        dminus=[_diag_id(d) for d in p.dminus],
        dzero=[_diag_id(d) for d in p.dzero],
    )


def _query_model(q: Query, costs: dict[str, float]) -> QueryModel:
    sentences = sorted(str(f) for f in q.sentences)
    return QueryModel(
        sentences=sentences,
        sentence_costs={s: costs[s] for s in sentences},
        components=sorted(q.components) if q.components is not None else None,
    )


def _scores_model(s: QueryScores) -> ScoresModel:
    return ScoresModel(
        m_value=s.m_value,
        c_value=s.c_value,
        p_true=s.p_true,
        reasoner_calls=s.reasoner_calls,
        time_p1p2_ms=s.time_p1p2_s * 1000.0,
        time_p3_ms=s.time_p3_s * 1000.0,
    )


def _entry_models(entry: HistoryEntry, config: SessionConfig) -> HistoryEntryModel:
    costs = {str(f): config.qcm.sentence_cost(f) for f in entry.query.sentences}
    return HistoryEntryModel(
        query=_query_model(entry.query, costs),
        partition=_partition_model(entry.partition),
        scores=_scores_model(entry.scores),
        answer=bool(entry.answer),
        diagnoses_before=_diagnosis_models(entry.diagnoses_before),
    )


@dataclass
class _Session:
    state: SessionState
    config: SessionConfig
    lock: threading.Lock = field(default_factory=threading.Lock)

    def view(self, session_id: str) -> SessionView:
        state = self.state
        if state.converged:
            status = "converged"
        elif state.pending is not None:
            status = "awaiting-answer"
        else:
            status = "querying"
        pending = None
        if state.pending is not None:
            entry = state.pending
            costs = {str(f): self.config.qcm.sentence_cost(f) for f in entry.query.sentences}
            pending = PendingQueryModel(
                query=_query_model(entry.query, costs),
                partition=_partition_model(entry.partition),
                scores=_scores_model(entry.scores),
            )
        return SessionView(
            session_id=session_id,
            status=status,
            converged=state.converged,
            diagnoses=_diagnosis_models(state.diagnoses),
            pending=pending,
            queries_asked=len(state.history),
            max_queries=self.config.max_queries,
        )


class SessionStore:
    """Thread-safe in-memory registry of live sessions."""

    def __init__(self) -> None:
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def add(self, session: _Session) -> str:
        session_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._sessions[session_id] = session
        return session_id

    def get(self, session_id: str) -> _Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def remove(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            del self._sessions[session_id]


def create_app(store: SessionStore | None = None, frontend_dir: str | Path | None = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="qdiag session service", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/sessions", response_model=SessionView, status_code=201)
    def create_session(request: CreateSessionRequest) -> SessionView:
        try:
            dpi = load_dpi(request.dpi.model_dump())
            config = request.config.to_config()
            state = new_session(dpi, config)
        except (DPIError, FormulaSyntaxError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session_id = store.add(_Session(state=state, config=config))
        return store.get(session_id).view(session_id)

    @app.get("/api/sessions/{session_id}", response_model=SessionView)
    def get_session(session_id: str) -> SessionView:
        session = store.get(session_id)
        with session.lock:
            return session.view(session_id)

    @app.post("/api/sessions/{session_id}/next-query", response_model=SessionView)
    def propose_query(session_id: str) -> SessionView:
        session = store.get(session_id)
        with session.lock:
            if session.state.converged:
                raise HTTPException(status_code=409, detail="session already converged")
            if session.state.pending is not None:
                raise HTTPException(status_code=409, detail="a query is already awaiting its answer")
            if len(session.state.history) >= session.config.max_queries:
                raise HTTPException(status_code=409, detail="query budget exhausted")
            next_query(session.state, session.config)
            return session.view(session_id)

    @app.post("/api/sessions/{session_id}/answer", response_model=SessionView)
    def answer_query(session_id: str, request: AnswerRequest) -> SessionView:
        session = store.get(session_id)
        with session.lock:
            pending = session.state.pending
            if pending is None:
                raise HTTPException(status_code=409, detail="no query awaiting an answer")
            try:
                apply_answer(session.state, pending.query, request.answer, session.config)
            except StaleQueryError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            except DPIError as exc:
                raise HTTPException(
                    status_code=409, detail=f"answer contradicts the system model: {exc}"
                ) from exc
            return session.view(session_id)

    @app.get("/api/sessions/{session_id}/history", response_model=HistoryModel)
    def session_history(session_id: str) -> HistoryModel:
        session = store.get(session_id)
        with session.lock:
            return HistoryModel(
                session_id=session_id,
                entries=[_entry_models(e, session.config) for e in session.state.history],
            )

    @app.delete("/api/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> None:
        store.remove(session_id)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app


def serve_api(host: str = "127.0.0.1", port: int = 8000, frontend_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(frontend_dir=frontend_dir), host=host, port=port, log_level="info")

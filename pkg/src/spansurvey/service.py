"""HTTP wire protocol: admin endpoints and the participant session API.

Participant requests carry no credentials beyond the session token in the
URL (capability URL); admin endpoints require ``Authorization: Bearer
<token>``. Request and response bodies are JSON. Every engine error maps to
exactly one (status, code) pair; the body of an error response is

    {"status": 409, "code": "gating_violation", "message": "...",
     "details": ["q1/bias"]}

Writes to a single session are serialized with a per-token lock; distinct
sessions proceed concurrently.
"""

from __future__ import annotations

import hmac
import io
import json
import secrets
import threading
import zipfile
from contextlib import contextmanager
from datetime import datetime, timezone

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import engine, spec as sp
from .engine import Event, Session
from .errors import (
    AlreadySubmitted,
    AtBoundary,
    EmptySelectionError,
    GatingViolation,
    NoAnnotationTask,
    OutOfRangeError,
    OverlapError,
    ParseError,
    RangeViolation,
    SchemaError,
    SectionFrozen,
    SectionNotCurrent,
    SessionComplete,
    StoreUnavailable,
    SurveyConflict,
    SurveyError,
    TooLongError,
    TooShortError,
    TypeMismatch,
    UnknownAnnotation,
    UnknownInput,
    UnknownQuestion,
    UnknownSection,
    UnknownSurvey,
    UnknownToken,
)
from .storage import Store

# The fixed error enumeration: every error class this package can raise from a
# handler, with its HTTP status. Documented in README.md (API reference).
ERROR_STATUS: dict[type[SurveyError], int] = {
    ParseError: 422,
    SchemaError: 422,
    TypeMismatch: 422,
    RangeViolation: 422,
    OutOfRangeError: 422,
    EmptySelectionError: 422,
    TooShortError: 422,
    TooLongError: 422,
    OverlapError: 422,
    NoAnnotationTask: 422,
    GatingViolation: 409,
    AtBoundary: 409,
    SectionFrozen: 409,
    AlreadySubmitted: 409,
    SectionNotCurrent: 409,
    SurveyConflict: 409,
    UnknownSurvey: 404,
    UnknownToken: 404,
    UnknownQuestion: 404,
    UnknownInput: 404,
    UnknownSection: 404,
    UnknownAnnotation: 404,
    SessionComplete: 410,
    StoreUnavailable: 503,
}


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class _TokenLocks:
    """One lock per session token so concurrent writers queue up."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    @contextmanager
    def hold(self, token: str):
        with self._guard:
            lock = self._locks.setdefault(token, threading.Lock())
        with lock:
            yield


class AnnotationBody(BaseModel):
    raw_start: int
    raw_end: int


def view_to_doc(token: str, survey_id: str, view: engine.View) -> dict:
    q = view.question
    return {
        "complete": False,
        "survey_id": survey_id,
        "session_token": token,
        "section_id": view.section_id,
        "question": sp.question_to_dict(q),
        "answers": {iid: engine.answer_to_dict(v) for iid, v in view.answers.items()},
        "annotations": [a.to_dict() for a in view.annotations],
        "progress": {
            "section_label": view.progress.section_label,
            "progress_noun": view.progress.progress_noun,
            "index": view.progress.index_1based,
            "total": view.progress.total,
        },
        "nav": {
            "can_prev": view.nav.can_prev,
            "can_next": view.nav.can_next,
            "can_submit": view.nav.can_submit,
        },
    }


def completion_doc(token: str, survey_id: str) -> dict:
    return {"complete": True, "survey_id": survey_id, "session_token": token}


def create_app(
    store: Store,
    admin_token: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="spansurvey", docs_url=None, redoc_url=None)
    locks = _TokenLocks()

    @app.exception_handler(SurveyError)
    def survey_error_handler(request: Request, exc: SurveyError):
        status = ERROR_STATUS.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={
                "status": status,
                "code": exc.code,
                "message": exc.message,
                "details": exc.details,
            },
        )

    def require_admin(request: Request) -> None:
        header = request.headers.get("authorization", "")
        supplied = header.removeprefix("Bearer ").strip() if header.startswith("Bearer ") else ""
        if not admin_token or not supplied or not hmac.compare_digest(supplied, admin_token):
            raise _unauthorized()

    def load(token: str) -> tuple[sp.SurveySpec, Session]:
        session = store.load_session(token)
        return store.get_spec(session.survey_id), session

    def commit(session: Session, op: str, payload: dict, at: str) -> None:
        event = Event(
            token=session.session_token,
            seq=store.next_seq(session.session_token),
            op=op, payload=payload, at=at,
        )
        store.save_session(session, [event])

    # -- health -----------------------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    # -- admin ------------------------------------------------------------------

    @app.post("/api/admin/surveys", status_code=201)
    async def upload_survey(request: Request, _: None = Depends(require_admin)):
        raw = (await request.body()).decode("utf-8")
        survey = sp.decode_spec(raw)
        violations = sp.validate_spec(survey)
        if violations:
            return JSONResponse(
                status_code=422,
                content={
                    "status": 422,
                    "code": "invalid_spec",
                    "message": "spec has invariant violations",
                    "details": [f"{v.path}: {v.message}" for v in violations],
                },
            )
        survey_id, created = store.put_spec(raw)
        return JSONResponse(
            status_code=201 if created else 200, content={"survey_id": survey_id}
        )

    @app.get("/api/admin/surveys/{survey_id}/export")
    def export_survey(
        survey_id: str,
        format: str = "csv",
        completed_only: bool = False,
        _: None = Depends(require_admin),
    ):
        if format == "full":
            doc = store.export_full(survey_id)
            return Response(
                content=doc,
                media_type="application/json",
                headers={
                    "Content-Disposition":
                        f'attachment; filename="{survey_id}_full.json"'
                },
            )
        if format == "csv":
            annotations_csv, responses_csv = store.export_csv(survey_id, completed_only)
            buf = io.BytesIO()
            with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
                zf.writestr(f"{survey_id}_annotations.csv", annotations_csv)
                zf.writestr(f"{survey_id}_responses.csv", responses_csv)
            return Response(
                content=buf.getvalue(),
                media_type="application/zip",
                headers={
                    "Content-Disposition":
                        f'attachment; filename="{survey_id}_export.zip"'
                },
            )
        raise RangeViolation(f"unknown export format '{format}'")

    # -- participant ---------------------------------------------------------------

    @app.post("/api/surveys/{survey_id}/sessions", status_code=201)
    def create_session(survey_id: str):
        survey = store.get_spec(survey_id)
        now = _utcnow()
        entropy = secrets.token_bytes(engine.TOKEN_BYTES)
        session = engine.create_session(survey, entropy, now)
        with locks.hold(session.session_token):
            commit(
                session, engine.OP_CREATE,
                {"survey_id": survey_id, "entropy": entropy.hex()}, now,
            )
        return {"session_token": session.session_token}

    @app.get("/api/sessions/{token}/current")
    def current(token: str):
        survey, session = load(token)
        view = engine.current_view(survey, session)
        return view_to_doc(token, survey.survey_id, view)

    @app.put("/api/sessions/{token}/answers/{question_id}/{input_id}")
    async def put_answer(token: str, question_id: str, input_id: str, request: Request):
        try:
            body = json.loads((await request.body()).decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise TypeMismatch(f"body is not valid JSON: {exc.msg}") from exc
        value = engine.answer_from_dict(body)
        now = _utcnow()
        with locks.hold(token):
            survey, session = load(token)
            engine.record_answer(survey, session, question_id, input_id, value, now)
            commit(
                session, engine.OP_ANSWER,
                {"question_id": question_id, "input_id": input_id,
                 "value": engine.answer_to_dict(value)},
                now,
            )
            nav = _nav_for(survey, session)
        return nav

    @app.post("/api/sessions/{token}/annotations/{question_id}", status_code=201)
    def post_annotation(token: str, question_id: str, body: AnnotationBody):
        now = _utcnow()
        with locks.hold(token):
            survey, session = load(token)
            ann = engine.add_annotation(
                survey, session, question_id, body.raw_start, body.raw_end, now
            )
            commit(
                session, engine.OP_ANNOTATE,
                {"question_id": question_id,
                 "raw_start": body.raw_start, "raw_end": body.raw_end},
                now,
            )
        return {
            "annotation_id": ann.annotation_id,
            "span": {"start": ann.span.start, "end": ann.span.end},
            "extracted": ann.extracted,
            "word_count": ann.word_count,
        }

    @app.delete("/api/sessions/{token}/annotations/{annotation_id}", status_code=204)
    def delete_annotation(token: str, annotation_id: str):
        now = _utcnow()
        with locks.hold(token):
            _, session = load(token)
            engine.remove_annotation(session, annotation_id, now)
            commit(
                session, engine.OP_REMOVE_ANNOTATION,
                {"annotation_id": annotation_id}, now,
            )
        return Response(status_code=204)

    @app.post("/api/sessions/{token}/next")
    def next_question(token: str):
        now = _utcnow()
        with locks.hold(token):
            survey, session = load(token)
            engine.advance(survey, session, now)
            commit(session, engine.OP_ADVANCE, {}, now)
            view = engine.current_view(survey, session)
        return view_to_doc(token, survey.survey_id, view)

    @app.post("/api/sessions/{token}/prev")
    def prev_question(token: str):
        now = _utcnow()
        with locks.hold(token):
            survey, session = load(token)
            engine.go_back(survey, session, now)
            commit(session, engine.OP_BACK, {}, now)
            view = engine.current_view(survey, session)
        return view_to_doc(token, survey.survey_id, view)

    @app.post("/api/sessions/{token}/sections/{section_id}/submit")
    def submit(token: str, section_id: str):
        now = _utcnow()
        with locks.hold(token):
            survey, session = load(token)
            engine.submit_section(survey, session, section_id, now)
            commit(session, engine.OP_SUBMIT, {"section_id": section_id}, now)
            if engine.is_complete(session):
                return completion_doc(token, survey.survey_id)
            view = engine.current_view(survey, session)
        return view_to_doc(token, survey.survey_id, view)

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _nav_for(survey: sp.SurveySpec, session: Session) -> dict:
    view = engine.current_view(survey, session)
    return {
        "can_prev": view.nav.can_prev,
        "can_next": view.nav.can_next,
        "can_submit": view.nav.can_submit,
    }


class _Unauthorized(SurveyError):
    code = "unauthorized"


ERROR_STATUS[_Unauthorized] = 401


def _unauthorized() -> _Unauthorized:
    return _Unauthorized("a valid admin bearer token is required")

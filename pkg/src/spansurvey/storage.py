"""Durable persistence and dataset export.

Everything lives in one SQLite file:

    specs    (survey_id PRIMARY KEY, spec_text)         -- canonical spec bytes
    sessions (token PRIMARY KEY, survey_id, data,       -- canonical session JSON
              is_complete)
    events   (token, seq, op, payload, at,              -- append-only op log
              PRIMARY KEY (token, seq))

Session rows are the materialized state; the events table is the audit trail.
Replaying a token's events through the engine reproduces its session row
byte-for-byte. ``save_session`` commits the row update and any new events in
one transaction, so a crash never leaves them out of step. WAL journaling
with synchronous=FULL makes an acknowledged save survive abrupt termination.

Exports:

    export_csv  -> (annotations.csv, responses.csv) text, RFC 4180, UTF-8, LF
    export_full -> one JSON document with the spec and every session

Both are deterministic: the same store contents always export the same bytes.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import engine, spec as sp
from .engine import Event, Session
from .errors import StoreUnavailable, SurveyConflict, UnknownSurvey, UnknownToken

ANNOTATION_HEADER = [
    "survey_id", "session_token", "question_id",
    "span_start", "span_end", "extracted_text", "word_count",
]
RESPONSE_HEADER = [
    "survey_id", "session_token", "section_id", "question_id", "input_id",
    "value_rendered",
]

_SCHEMA = """
CREATE TABLE IF NOT EXISTS specs (
    survey_id TEXT PRIMARY KEY,
    spec_text TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token       TEXT PRIMARY KEY,
    survey_id   TEXT NOT NULL REFERENCES specs(survey_id),
    data        TEXT NOT NULL,
    is_complete INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS events (
    token   TEXT NOT NULL,
    seq     INTEGER NOT NULL,
    op      TEXT NOT NULL,
    payload TEXT NOT NULL,
    at      TEXT NOT NULL,
    PRIMARY KEY (token, seq)
);
"""


def session_to_canonical_json(session: Session) -> str:
    """Deterministic byte representation used for the sessions.data column."""
    return json.dumps(
        session.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


@dataclass
class ExportBundle:
    """Flattened annotation and response rows for one survey."""

    annotations: list[list] = field(default_factory=list)
    responses: list[list] = field(default_factory=list)
    completed_only: bool = False


def render_answer(value: engine.AnswerValue) -> str:
    """Single-cell CSV rendering of an answer value."""
    if isinstance(value, engine.Choice):
        return value.value
    if isinstance(value, engine.ChoiceSet):
        parts = list(value.values) + ["+" + a for a in value.free_additions]
        return "|".join(parts)
    if isinstance(value, engine.Number):
        return str(value.value)
    if isinstance(value, engine.SliderPos):
        return str(value.position)
    if isinstance(value, engine.Text):
        return value.value
    raise TypeError(f"not an answer value: {value!r}")


class Store:
    """Single-file durable store. Writes are serialized; one writer process."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        try:
            self._conn = sqlite3.connect(self.path, check_same_thread=False)
        except sqlite3.Error as exc:
            raise StoreUnavailable(f"cannot open store at {self.path}: {exc}") from exc
        self._lock = threading.RLock()
        with self._lock, self._conn:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=FULL")
            self._conn.execute("PRAGMA foreign_keys=ON")
            self._conn.executescript(_SCHEMA)
        self._spec_cache: dict[str, sp.SurveySpec] = {}

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- specs -----------------------------------------------------------------

    def put_spec(self, raw: str) -> tuple[str, bool]:
        """Parse, validate and store a spec canonically.

        Returns (survey_id, created). Re-storing identical canonical bytes is
        a no-op; a different spec under an existing id raises SurveyConflict.
        """
        survey = sp.parse_spec(raw)
        canonical = sp.canonical_serialize(survey)
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT spec_text FROM specs WHERE survey_id = ?",
                (survey.survey_id,),
            ).fetchone()
            if row is not None:
                if row[0] == canonical:
                    return survey.survey_id, False
                raise SurveyConflict(
                    f"survey '{survey.survey_id}' already exists with different content"
                )
            self._conn.execute(
                "INSERT INTO specs (survey_id, spec_text) VALUES (?, ?)",
                (survey.survey_id, canonical),
            )
        self._spec_cache[survey.survey_id] = survey
        return survey.survey_id, True

    def get_spec_text(self, survey_id: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT spec_text FROM specs WHERE survey_id = ?", (survey_id,)
            ).fetchone()
        if row is None:
            raise UnknownSurvey(f"no survey '{survey_id}'")
        return row[0]

    def get_spec(self, survey_id: str) -> sp.SurveySpec:
        cached = self._spec_cache.get(survey_id)
        if cached is not None:
            return cached
        survey = sp.parse_spec(self.get_spec_text(survey_id))
        self._spec_cache[survey_id] = survey
        return survey

    def list_survey_ids(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT survey_id FROM specs ORDER BY survey_id"
            ).fetchall()
        return [r[0] for r in rows]

    # -- sessions ----------------------------------------------------------------

    def save_session(self, session: Session, new_events: list[Event] = ()) -> None:
        """Atomic upsert of the session row plus append of any new events."""
        data = session_to_canonical_json(session)
        complete = 1 if engine.is_complete(session) else 0
        try:
            with self._lock, self._conn:
                exists = self._conn.execute(
                    "SELECT 1 FROM specs WHERE survey_id = ?", (session.survey_id,)
                ).fetchone()
                if exists is None:
                    raise UnknownSurvey(f"no survey '{session.survey_id}'")
                self._conn.execute(
                    "INSERT INTO sessions (token, survey_id, data, is_complete)"
                    " VALUES (?, ?, ?, ?)"
                    " ON CONFLICT(token) DO UPDATE SET data = excluded.data,"
                    " is_complete = excluded.is_complete",
                    (session.session_token, session.survey_id, data, complete),
                )
                for ev in new_events:
                    self._conn.execute(
                        "INSERT INTO events (token, seq, op, payload, at)"
                        " VALUES (?, ?, ?, ?, ?)",
                        (ev.token, ev.seq, ev.op,
                         json.dumps(ev.payload, sort_keys=True, separators=(",", ":")),
                         ev.at),
                    )
        except sqlite3.Error as exc:
            raise StoreUnavailable(f"write failed: {exc}") from exc

    def load_session(self, token: str) -> Session:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM sessions WHERE token = ?", (token,)
            ).fetchone()
        if row is None:
            raise UnknownToken(f"no session '{token}'")
        return Session.from_dict(json.loads(row[0]))

    def load_session_json(self, token: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM sessions WHERE token = ?", (token,)
            ).fetchone()
        if row is None:
            raise UnknownToken(f"no session '{token}'")
        return row[0]

    def events_for(self, token: str) -> list[Event]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT seq, op, payload, at FROM events WHERE token = ? ORDER BY seq",
                (token,),
            ).fetchall()
        return [
            Event(token=token, seq=seq, op=op, payload=json.loads(payload), at=at)
            for seq, op, payload, at in rows
        ]

    def next_seq(self, token: str) -> int:
        with self._lock:
            row = self._conn.execute(
                "SELECT COALESCE(MAX(seq), 0) FROM events WHERE token = ?", (token,)
            ).fetchone()
        return row[0] + 1

    def replay(self, token: str) -> Session:
        """Rebuild a session purely from its event log."""
        events = self.events_for(token)
        if not events:
            raise UnknownToken(f"no events for session '{token}'")
        session = self.load_session(token)
        return engine.replay_events(self.get_spec(session.survey_id), events)

    def sessions_for(self, survey_id: str, completed_only: bool = False) -> list[Session]:
        """Sessions started against ``survey_id``, ordered by token."""
        query = "SELECT data FROM sessions WHERE survey_id = ?"
        if completed_only:
            query += " AND is_complete = 1"
        query += " ORDER BY token"
        with self._lock:
            rows = self._conn.execute(query, (survey_id,)).fetchall()
        return [Session.from_dict(json.loads(r[0])) for r in rows]

    # -- export ------------------------------------------------------------------

    def export_bundle(self, survey_id: str, completed_only: bool = False) -> ExportBundle:
        survey = self.get_spec(survey_id)
        bundle = ExportBundle(completed_only=completed_only)
        for session in self.sessions_for(survey_id, completed_only):
            for sec, state in zip(survey.sections, session.section_states):
                for q in sec.questions:
                    for ann in state.annotations.get(q.question_id, []):
                        bundle.annotations.append([
                            survey_id, session.session_token, q.question_id,
                            ann.span.start, ann.span.end, ann.extracted,
                            ann.word_count,
                        ])
                    answers = state.answers.get(q.question_id, {})
                    for inp in q.inputs:
                        if inp.input_id in answers:
                            bundle.responses.append([
                                survey_id, session.session_token, sec.section_id,
                                q.question_id, inp.input_id,
                                render_answer(answers[inp.input_id]),
                            ])
        bundle.annotations.sort(key=lambda r: (r[1], r[2], r[3]))
        bundle.responses.sort(key=lambda r: (r[1], r[2], r[4], r[3]))
        return bundle

    def export_csv(self, survey_id: str, completed_only: bool = False) -> tuple[str, str]:
        """(annotations csv, responses csv) as text."""
        bundle = self.export_bundle(survey_id, completed_only)
        return (
            _render_csv(ANNOTATION_HEADER, bundle.annotations),
            _render_csv(RESPONSE_HEADER, bundle.responses),
        )

    def export_full(self, survey_id: str) -> str:
        """One JSON document: the spec plus every session's full state."""
        survey = self.get_spec(survey_id)
        sessions_doc = []
        for session in self.sessions_for(survey_id, completed_only=False):
            sections_doc = []
            for sec, state in zip(survey.sections, session.section_states):
                questions_doc = []
                for q in sec.questions:
                    answers = state.answers.get(q.question_id, {})
                    questions_doc.append({
                        "question_id": q.question_id,
                        "answers": {
                            iid: engine.answer_to_dict(v) for iid, v in answers.items()
                        },
                        "annotations": [
                            a.to_dict()
                            for a in state.annotations.get(q.question_id, [])
                        ],
                    })
                sections_doc.append({
                    "section_id": sec.section_id,
                    "order": list(state.order),
                    "submitted": state.submitted,
                    "questions": questions_doc,
                })
            sessions_doc.append({
                "session_token": session.session_token,
                "started_at": session.started_at,
                "updated_at": session.updated_at,
                "complete": engine.is_complete(session),
                "sections": sections_doc,
            })
        doc = {
            "survey": sp.spec_to_dict(survey),
            "sessions": sessions_doc,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def bundle_from_full_export(doc_text: str, completed_only: bool = False) -> ExportBundle:
    """Rebuild the flattened row view from a full-export document."""
    doc = json.loads(doc_text)
    survey_id = doc["survey"]["survey_id"]
    bundle = ExportBundle(completed_only=completed_only)
    for session in doc["sessions"]:
        if completed_only and not session["complete"]:
            continue
        token = session["session_token"]
        for sec in session["sections"]:
            for q in sec["questions"]:
                for ann in q["annotations"]:
                    bundle.annotations.append([
                        survey_id, token, q["question_id"],
                        ann["start"], ann["end"], ann["extracted"], ann["word_count"],
                    ])
                for iid, value in q["answers"].items():
                    bundle.responses.append([
                        survey_id, token, sec["section_id"], q["question_id"], iid,
                        render_answer(engine.answer_from_dict(value)),
                    ])
    bundle.annotations.sort(key=lambda r: (r[1], r[2], r[3]))
    bundle.responses.sort(key=lambda r: (r[1], r[2], r[4], r[3]))
    return bundle


def _render_csv(header: list[str], rows: list[list]) -> str:
    """RFC 4180 rendering with LF line endings."""
    lines = [_csv_line(header)]
    lines.extend(_csv_line([str(cell) for cell in row]) for row in rows)
    return "".join(lines)


def _csv_line(cells: list[str]) -> str:
    return ",".join(_csv_cell(c) for c in cells) + "\n"


def _csv_cell(cell: str) -> str:
    if any(ch in cell for ch in ',"\n\r'):
        return '"' + cell.replace('"', '""') + '"'
    return cell

"""Per-participant session state machine.

A session walks one survey: per-section question order (fixed or seeded
random), answers, annotations, and a cursor. Sections are completed with an
explicit submit that freezes them forever. All transitions here are
deterministic given (spec, entropy, operation sequence, timestamps), which is
what makes the event log in storage replayable; the service layer supplies
``now`` timestamps and persists one event per successful transition.

Navigation gating:

    can_next   - not at the section's last question, and the current
                 question's mandatory inputs (plus a required annotation,
                 if the task demands one) are satisfied
    can_prev   - section allows going back, not at the first question,
                 section not submitted
    can_submit - at the section's last question and every gate in the whole
                 section is satisfied

``advance`` / ``go_back`` / ``submit_section`` succeed exactly when the
corresponding flag is true; the flags are therefore safe to drive UI button
states directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import spec as sp
from .annotation import (
    Annotation,
    WordSpan,
    check_bounds,
    check_overlap,
    snap_to_words,
    word_count,
)
from .errors import (
    AlreadySubmitted,
    AtBoundary,
    GatingViolation,
    NoAnnotationTask,
    OverlapError,
    RangeViolation,
    SectionFrozen,
    SectionNotCurrent,
    SessionComplete,
    TooLongError,
    TooShortError,
    TypeMismatch,
    UnknownAnnotation,
    UnknownInput,
    UnknownQuestion,
    UnknownSection,
    SurveyError,
)
from .rng import section_seed, seeded_shuffle

TOKEN_BYTES = 16


# -- answer values ---------------------------------------------------------------

@dataclass(frozen=True)
class Choice:
    value: str


@dataclass(frozen=True)
class ChoiceSet:
    values: tuple[str, ...] = ()
    free_additions: tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return len(self.values) + len(self.free_additions)


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class SliderPos:
    position: int


@dataclass(frozen=True)
class Text:
    value: str


AnswerValue = Choice | ChoiceSet | Number | SliderPos | Text


def answer_to_dict(value: AnswerValue) -> dict:
    if isinstance(value, Choice):
        return {"type": "choice", "value": value.value}
    if isinstance(value, ChoiceSet):
        return {
            "type": "choice_set",
            "values": list(value.values),
            "free_additions": list(value.free_additions),
        }
    if isinstance(value, Number):
        return {"type": "number", "value": value.value}
    if isinstance(value, SliderPos):
        return {"type": "slider", "position": value.position}
    if isinstance(value, Text):
        return {"type": "text", "value": value.value}
    raise TypeError(f"not an answer value: {value!r}")


def answer_from_dict(d: dict) -> AnswerValue:
    """Decode the wire/storage form of an answer; raises TypeMismatch."""
    if not isinstance(d, dict) or "type" not in d:
        raise TypeMismatch("answer must be an object with a 'type' key")
    kind = d["type"]
    try:
        if kind == "choice":
            return Choice(_as_str(d["value"]))
        if kind == "choice_set":
            return ChoiceSet(
                tuple(_as_str(v) for v in _as_list(d.get("values", []))),
                tuple(_as_str(v) for v in _as_list(d.get("free_additions", []))),
            )
        if kind == "number":
            return Number(_as_int(d["value"]))
        if kind == "slider":
            return SliderPos(_as_int(d["position"]))
        if kind == "text":
            return Text(_as_str(d["value"]))
    except KeyError as exc:
        raise TypeMismatch(f"answer of type '{kind}' is missing {exc}") from exc
    raise TypeMismatch(f"unknown answer type '{kind}'")


def _as_str(v) -> str:
    if not isinstance(v, str):
        raise TypeMismatch(f"expected a string, got {v!r}")
    return v


def _as_int(v) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise TypeMismatch(f"expected an integer, got {v!r}")
    return v


def _as_list(v) -> list:
    if not isinstance(v, list):
        raise TypeMismatch(f"expected an array, got {v!r}")
    return v


# -- session state ----------------------------------------------------------------

@dataclass
class SectionState:
    order: list[int]
    submitted: bool = False
    # question_id -> input_id -> value; input_ids are only unique per question
    answers: dict[str, dict[str, AnswerValue]] = field(default_factory=dict)
    annotations: dict[str, list[Annotation]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "submitted": self.submitted,
            "answers": {
                qid: {iid: answer_to_dict(v) for iid, v in by_input.items()}
                for qid, by_input in self.answers.items()
            },
            "annotations": {
                qid: [a.to_dict() for a in anns]
                for qid, anns in self.annotations.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SectionState":
        return cls(
            order=list(d["order"]),
            submitted=d["submitted"],
            answers={
                qid: {iid: answer_from_dict(v) for iid, v in by_input.items()}
                for qid, by_input in d["answers"].items()
            },
            annotations={
                qid: [Annotation.from_dict(a) for a in anns]
                for qid, anns in d["annotations"].items()
            },
        )


@dataclass
class Session:
    session_token: str
    survey_id: str
    started_at: str
    updated_at: str
    section_states: list[SectionState]
    cursor_section: int = 0
    cursor_position: int = 0
    annotation_counter: int = 0

    def to_dict(self) -> dict:
        return {
            "session_token": self.session_token,
            "survey_id": self.survey_id,
            "started_at": self.started_at,
            "updated_at": self.updated_at,
            "cursor": {"section": self.cursor_section, "position": self.cursor_position},
            "annotation_counter": self.annotation_counter,
            "sections": [s.to_dict() for s in self.section_states],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            session_token=d["session_token"],
            survey_id=d["survey_id"],
            started_at=d["started_at"],
            updated_at=d["updated_at"],
            section_states=[SectionState.from_dict(s) for s in d["sections"]],
            cursor_section=d["cursor"]["section"],
            cursor_position=d["cursor"]["position"],
            annotation_counter=d["annotation_counter"],
        )


@dataclass
class Progress:
    section_label: str
    progress_noun: str
    index_1based: int
    total: int


@dataclass
class Nav:
    can_prev: bool
    can_next: bool
    can_submit: bool


@dataclass
class View:
    """Everything a client needs to render the current question."""

    section_id: str
    question: sp.Question
    answers: dict[str, AnswerValue]
    annotations: list[Annotation]
    progress: Progress
    nav: Nav


def is_complete(session: Session) -> bool:
    return session.cursor_section >= len(session.section_states)


# -- creation ---------------------------------------------------------------------

def create_session(survey: sp.SurveySpec, entropy: bytes, now: str) -> Session:
    """Fresh session; same (survey, entropy) always yields the same session."""
    if len(entropy) != TOKEN_BYTES:
        raise ValueError(f"entropy must be {TOKEN_BYTES} bytes, got {len(entropy)}")
    token = entropy.hex()
    states = []
    for sec in survey.sections:
        n = len(sec.questions)
        if sec.ordering == sp.ORDERING_RANDOM:
            order = seeded_shuffle(n, section_seed(token, sec.section_id))
        else:
            order = list(range(n))
        states.append(SectionState(order=order))
    return Session(
        session_token=token,
        survey_id=survey.survey_id,
        started_at=now,
        updated_at=now,
        section_states=states,
    )


# -- lookups ----------------------------------------------------------------------

def _require_active(session: Session) -> None:
    if is_complete(session):
        raise SessionComplete("session is complete")


def _locate_question(survey: sp.SurveySpec, question_id: str) -> tuple[int, sp.Question]:
    for si, sec in enumerate(survey.sections):
        for q in sec.questions:
            if q.question_id == question_id:
                return si, q
    raise UnknownQuestion(f"no question '{question_id}' in survey '{survey.survey_id}'")


def _current_question(survey: sp.SurveySpec, session: Session) -> sp.Question:
    sec = survey.sections[session.cursor_section]
    state = session.section_states[session.cursor_section]
    return sec.questions[state.order[session.cursor_position]]


# -- gating -----------------------------------------------------------------------

def _input_satisfied(inp: sp.InputSpec, value: AnswerValue | None) -> bool:
    if value is None:
        return not inp.mandatory
    if isinstance(inp, sp.MultiSelect) and isinstance(value, ChoiceSet):
        # an empty set is as good as no answer; a partial set must reach
        # min_selections before it stops blocking
        if value.total == 0:
            return not inp.mandatory
        return value.total >= inp.min_selections
    return True


def missing_for_question(q: sp.Question, state: SectionState) -> list[str]:
    """Qualified ids of unsatisfied gates on one question."""
    missing = []
    if (
        q.annotation_task is not None
        and q.annotation_task.required
        and not state.annotations.get(q.question_id)
    ):
        missing.append(f"{q.question_id}/annotation")
    answers = state.answers.get(q.question_id, {})
    for inp in q.inputs:
        if not _input_satisfied(inp, answers.get(inp.input_id)):
            missing.append(f"{q.question_id}/{inp.input_id}")
    return missing


def missing_for_section(sec: sp.Section, state: SectionState) -> list[str]:
    missing = []
    for q in sec.questions:
        missing.extend(missing_for_question(q, state))
    return missing


# -- views ------------------------------------------------------------------------

def current_view(survey: sp.SurveySpec, session: Session) -> View:
    _require_active(session)
    sec = survey.sections[session.cursor_section]
    state = session.section_states[session.cursor_section]
    q = sec.questions[state.order[session.cursor_position]]
    at_last = session.cursor_position == len(state.order) - 1
    nav = Nav(
        can_prev=(sec.allow_back and session.cursor_position > 0 and not state.submitted),
        can_next=(not at_last and not missing_for_question(q, state)),
        can_submit=(at_last and not missing_for_section(sec, state)),
    )
    return View(
        section_id=sec.section_id,
        question=q,
        answers=dict(state.answers.get(q.question_id, {})),
        annotations=list(state.annotations.get(q.question_id, [])),
        progress=Progress(
            section_label=sec.label,
            progress_noun=sec.progress_noun,
            index_1based=session.cursor_position + 1,
            total=len(state.order),
        ),
        nav=nav,
    )


# -- transitions --------------------------------------------------------------------

def record_answer(
    survey: sp.SurveySpec,
    session: Session,
    question_id: str,
    input_id: str,
    value: AnswerValue,
    now: str,
) -> None:
    """Store (or overwrite) one answer after validating it against its input."""
    si, q = _locate_question(survey, question_id)
    state = session.section_states[si]
    if state.submitted:
        raise SectionFrozen(f"section '{survey.sections[si].section_id}' is submitted")
    inp = next((i for i in q.inputs if i.input_id == input_id), None)
    if inp is None:
        raise UnknownInput(f"question '{question_id}' has no input '{input_id}'")
    _check_answer(inp, value)
    state.answers.setdefault(question_id, {})[input_id] = value
    session.updated_at = now


def _check_answer(inp: sp.InputSpec, value: AnswerValue) -> None:
    if isinstance(inp, sp.SingleSelect):
        if not isinstance(value, Choice):
            raise TypeMismatch(f"input '{inp.input_id}' takes a choice answer")
        if value.value not in {o.value for o in inp.options}:
            raise RangeViolation(f"'{value.value}' is not an option of '{inp.input_id}'")
    elif isinstance(inp, sp.MultiSelect):
        if not isinstance(value, ChoiceSet):
            raise TypeMismatch(f"input '{inp.input_id}' takes a choice_set answer")
        allowed = {o.value for o in inp.options}
        seen: set[str] = set()
        for v in value.values:
            if v not in allowed:
                raise RangeViolation(f"'{v}' is not an option of '{inp.input_id}'")
            if v in seen:
                raise RangeViolation(f"option '{v}' selected twice")
            seen.add(v)
        if value.free_additions and not inp.extensible:
            raise RangeViolation(f"input '{inp.input_id}' does not accept free additions")
        seen_free: set[str] = set()
        for addition in value.free_additions:
            if not addition.strip():
                raise RangeViolation("free additions must be non-empty")
            if addition in seen_free:
                raise RangeViolation(f"free addition '{addition}' given twice")
            seen_free.add(addition)
    elif isinstance(inp, sp.Numeric):
        if not isinstance(value, Number):
            raise TypeMismatch(f"input '{inp.input_id}' takes a number answer")
        if not (inp.min_value <= value.value <= inp.max_value):
            raise RangeViolation(
                f"{value.value} outside [{inp.min_value}, {inp.max_value}]"
            )
        if (value.value - inp.min_value) % inp.step != 0:
            raise RangeViolation(
                f"{value.value} does not land on step {inp.step} from {inp.min_value}"
            )
    elif isinstance(inp, sp.Slider):
        if not isinstance(value, SliderPos):
            raise TypeMismatch(f"input '{inp.input_id}' takes a slider answer")
        if not (0 <= value.position < inp.positions):
            raise RangeViolation(
                f"position {value.position} outside 0..{inp.positions - 1}"
            )
    elif isinstance(inp, sp.FreeText):
        if not isinstance(value, Text):
            raise TypeMismatch(f"input '{inp.input_id}' takes a text answer")
        if len(value.value) > inp.max_chars:
            raise RangeViolation(
                f"text of {len(value.value)} chars exceeds max_chars={inp.max_chars}"
            )
    else:
        raise TypeMismatch(f"unknown input kind {type(inp).__name__}")


def add_annotation(
    survey: sp.SurveySpec,
    session: Session,
    question_id: str,
    raw_start: int,
    raw_end: int,
    now: str,
) -> Annotation:
    """Snap a raw selection to words, validate it, and store it."""
    si, q = _locate_question(survey, question_id)
    state = session.section_states[si]
    if state.submitted:
        raise SectionFrozen(f"section '{survey.sections[si].section_id}' is submitted")
    task = q.annotation_task
    if task is None:
        raise NoAnnotationTask(f"question '{question_id}' has no annotation task")

    span = snap_to_words(task.text, raw_start, raw_end)
    verdict = check_bounds(task, span)
    if verdict.kind == "too_long":
        raise TooLongError(
            f"selection spans {word_count(task.text, span)} words; "
            f"the limit is {task.max_words}"
        )
    if verdict.kind == "too_short":
        raise TooShortError(
            f"selection spans {word_count(task.text, span)} words; "
            f"at least {task.min_words} required"
        )
    existing = state.annotations.get(question_id, [])
    overlap = check_overlap(existing, span)
    if not overlap.is_ok:
        raise OverlapError(
            f"selection overlaps annotation '{overlap.overlap_with}'",
            details=[overlap.overlap_with],
        )

    session.annotation_counter += 1
    ann = Annotation(
        annotation_id=f"a{session.annotation_counter}",
        question_id=question_id,
        span=span,
        extracted=task.text[span.start:span.end],
        word_count=word_count(task.text, span),
    )
    state.annotations.setdefault(question_id, []).append(ann)
    session.updated_at = now
    return ann


def remove_annotation(session: Session, annotation_id: str, now: str) -> None:
    for state in session.section_states:
        for qid, anns in state.annotations.items():
            for i, ann in enumerate(anns):
                if ann.annotation_id == annotation_id:
                    if state.submitted:
                        raise SectionFrozen(
                            f"annotation '{annotation_id}' is in a submitted section"
                        )
                    del anns[i]
                    if not anns:
                        del state.annotations[qid]
                    session.updated_at = now
                    return
    raise UnknownAnnotation(f"no annotation '{annotation_id}'")


def advance(survey: sp.SurveySpec, session: Session, now: str) -> None:
    """Move to the next question in the section's permuted order."""
    _require_active(session)
    state = session.section_states[session.cursor_section]
    if session.cursor_position >= len(state.order) - 1:
        raise AtBoundary("already at the section's last question; submit instead")
    missing = missing_for_question(_current_question(survey, session), state)
    if missing:
        raise GatingViolation("mandatory inputs are missing", details=missing)
    session.cursor_position += 1
    session.updated_at = now


def go_back(survey: sp.SurveySpec, session: Session, now: str) -> None:
    _require_active(session)
    sec = survey.sections[session.cursor_section]
    if not sec.allow_back:
        raise AtBoundary(f"section '{sec.section_id}' does not allow going back")
    if session.cursor_position == 0:
        raise AtBoundary("already at the section's first question")
    session.cursor_position -= 1
    session.updated_at = now


def submit_section(survey: sp.SurveySpec, session: Session, section_id: str, now: str) -> None:
    """Freeze the current section and move on (or complete the session)."""
    section_index = next(
        (i for i, s in enumerate(survey.sections) if s.section_id == section_id), None
    )
    if section_index is None:
        raise UnknownSection(f"no section '{section_id}' in survey '{survey.survey_id}'")
    if session.section_states[section_index].submitted:
        raise AlreadySubmitted(f"section '{section_id}' was already submitted")
    _require_active(session)
    if section_index != session.cursor_section:
        raise SectionNotCurrent(f"section '{section_id}' is not the current section")
    sec = survey.sections[section_index]
    state = session.section_states[section_index]
    missing = missing_for_section(sec, state)
    if session.cursor_position != len(state.order) - 1:
        raise GatingViolation(
            "submit is only available from the section's last question",
            details=missing,
        )
    if missing:
        raise GatingViolation("mandatory inputs are missing", details=missing)
    state.submitted = True
    session.cursor_section += 1
    session.cursor_position = 0
    session.updated_at = now


# -- event replay -------------------------------------------------------------------

OP_CREATE = "create"
OP_ANSWER = "answer"
OP_ANNOTATE = "annotate"
OP_REMOVE_ANNOTATION = "remove_annotation"
OP_ADVANCE = "advance"
OP_BACK = "back"
OP_SUBMIT = "submit"


@dataclass
class Event:
    """One logged operation on a session; seq is 1-based and gap-free."""

    token: str
    seq: int
    op: str
    payload: dict
    at: str


def apply_event(survey: sp.SurveySpec, session: Session, op: str, payload: dict, at: str) -> None:
    """Apply one logged operation to a session during replay."""
    if op == OP_ANSWER:
        record_answer(
            survey, session, payload["question_id"], payload["input_id"],
            answer_from_dict(payload["value"]), at,
        )
    elif op == OP_ANNOTATE:
        add_annotation(
            survey, session, payload["question_id"],
            payload["raw_start"], payload["raw_end"], at,
        )
    elif op == OP_REMOVE_ANNOTATION:
        remove_annotation(session, payload["annotation_id"], at)
    elif op == OP_ADVANCE:
        advance(survey, session, at)
    elif op == OP_BACK:
        go_back(survey, session, at)
    elif op == OP_SUBMIT:
        submit_section(survey, session, payload["section_id"], at)
    else:
        raise SurveyError(f"unknown event op '{op}'")


def replay_events(survey: sp.SurveySpec, events: list[Event]) -> Session:
    """Rebuild a session from its full event log (first event must be create)."""
    if not events or events[0].op != OP_CREATE:
        raise SurveyError("event log must start with a create event")
    first = events[0]
    session = create_session(survey, bytes.fromhex(first.payload["entropy"]), first.at)
    for ev in events[1:]:
        apply_event(survey, session, ev.op, ev.payload, ev.at)
    return session

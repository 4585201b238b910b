"""Word tokenization and span handling for annotation tasks.

All offsets are counted in Unicode scalar values (Python string indices),
never bytes or UTF-16 units, so spans stored by one client mean the same
thing to every other client. A "word" is a maximal run of non-whitespace
characters; punctuation stays attached to its word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import EmptySelectionError, OutOfRangeError

if TYPE_CHECKING:
    from .spec import AnnotationTask

_WORD_RE = re.compile(r"\S+")

VERDICT_OK = "ok"
VERDICT_TOO_SHORT = "too_short"
VERDICT_TOO_LONG = "too_long"
VERDICT_OUT_OF_RANGE = "out_of_range"
VERDICT_OVERLAP = "overlap"


@dataclass(frozen=True)
class WordSpan:
    """Half-open character range [start, end) into a task text."""

    start: int
    end: int


@dataclass(frozen=True)
class AnnotationVerdict:
    kind: str
    overlap_with: str | None = None

    @property
    def is_ok(self) -> bool:
        return self.kind == VERDICT_OK


@dataclass
class Annotation:
    """A stored word-aligned selection on one question's text."""

    annotation_id: str
    question_id: str
    span: WordSpan
    extracted: str
    word_count: int

    def to_dict(self) -> dict:
        return {
            "annotation_id": self.annotation_id,
            "question_id": self.question_id,
            "start": self.span.start,
            "end": self.span.end,
            "extracted": self.extracted,
            "word_count": self.word_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        return cls(
            annotation_id=d["annotation_id"],
            question_id=d["question_id"],
            span=WordSpan(d["start"], d["end"]),
            extracted=d["extracted"],
            word_count=d["word_count"],
        )


def tokenize_words(text: str) -> list[WordSpan]:
    """Spans of the maximal non-whitespace runs of ``text``, in order."""
    return [WordSpan(m.start(), m.end()) for m in _WORD_RE.finditer(text)]


def snap_to_words(text: str, start: int, end: int) -> WordSpan:
    """Smallest word-aligned span containing every word touched by [start, end).

    A selection that begins or ends mid-word grows outward to that word's
    boundaries; leading/trailing whitespace inside the selection is dropped.
    Raises OutOfRangeError for offsets outside the text and
    EmptySelectionError when the selection touches no word at all.
    """
    if not (0 <= start < end <= len(text)):
        raise OutOfRangeError(
            f"selection [{start}, {end}) outside text of length {len(text)}"
        )
    touched = [w for w in tokenize_words(text) if w.start < end and start < w.end]
    if not touched:
        raise EmptySelectionError("selection contains no words")
    return WordSpan(touched[0].start, touched[-1].end)


def word_count(text: str, span: WordSpan) -> int:
    """Number of words of ``text`` lying fully inside ``span``."""
    return sum(
        1 for w in tokenize_words(text) if w.start >= span.start and w.end <= span.end
    )


def check_bounds(task: "AnnotationTask", span: WordSpan) -> AnnotationVerdict:
    """Verdict on a word-aligned span against the task's word-count bounds."""
    count = word_count(task.text, span)
    if count > task.max_words:
        return AnnotationVerdict(VERDICT_TOO_LONG)
    if count < task.min_words:
        return AnnotationVerdict(VERDICT_TOO_SHORT)
    return AnnotationVerdict(VERDICT_OK)


def check_overlap(existing: list[Annotation], candidate: WordSpan) -> AnnotationVerdict:
    """Overlap verdict against already-stored annotations on the same text."""
    for ann in existing:
        if ann.span.start < candidate.end and candidate.start < ann.span.end:
            return AnnotationVerdict(VERDICT_OVERLAP, overlap_with=ann.annotation_id)
    return AnnotationVerdict(VERDICT_OK)

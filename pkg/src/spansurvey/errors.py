"""Exception hierarchy shared by every layer.

Each error class carries a stable machine-readable ``code``; the HTTP layer
maps codes onto status codes (see service.ERROR_STATUS) and the CLI prints
them. ``details`` is an optional list of strings, e.g. the qualified ids of
missing mandatory inputs in a gating violation.
"""

from __future__ import annotations


class SurveyError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or []


# -- survey spec -------------------------------------------------------------

class ParseError(SurveyError):
    """The spec file is not syntactically valid."""

    code = "invalid_spec"

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SchemaError(SurveyError):
    """The spec file parses but violates the schema or an invariant."""

    code = "invalid_spec"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- annotation --------------------------------------------------------------

class OutOfRangeError(SurveyError):
    code = "out_of_range"


class EmptySelectionError(SurveyError):
    code = "empty_selection"


class TooShortError(SurveyError):
    code = "too_short"


class TooLongError(SurveyError):
    code = "too_long"


class OverlapError(SurveyError):
    code = "overlap"


# -- session engine ----------------------------------------------------------

class UnknownQuestion(SurveyError):
    code = "unknown_question"


class UnknownInput(SurveyError):
    code = "unknown_input"


class UnknownSection(SurveyError):
    code = "unknown_section"


class UnknownAnnotation(SurveyError):
    code = "unknown_annotation"


class NoAnnotationTask(SurveyError):
    code = "no_annotation_task"


class SectionFrozen(SurveyError):
    code = "section_frozen"


class AlreadySubmitted(SurveyError):
    code = "already_submitted"


class SectionNotCurrent(SurveyError):
    code = "not_current_section"


class AtBoundary(SurveyError):
    code = "at_boundary"


class GatingViolation(SurveyError):
    code = "gating_violation"


class TypeMismatch(SurveyError):
    code = "type_mismatch"


class RangeViolation(SurveyError):
    code = "range_violation"


class SessionComplete(SurveyError):
    code = "session_complete"


# -- storage -----------------------------------------------------------------

class UnknownSurvey(SurveyError):
    code = "unknown_survey"


class UnknownToken(SurveyError):
    code = "unknown_session"


class SurveyConflict(SurveyError):
    code = "survey_conflict"


class StoreUnavailable(SurveyError):
    code = "store_unavailable"

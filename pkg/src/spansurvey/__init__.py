"""Self-hosted web surveys that mix span annotation with regular inputs."""

from .annotation import (
    Annotation,
    AnnotationVerdict,
    WordSpan,
    check_bounds,
    check_overlap,
    snap_to_words,
    tokenize_words,
    word_count,
)
from .engine import (
    Choice,
    ChoiceSet,
    Event,
    Number,
    Session,
    SliderPos,
    Text,
    add_annotation,
    advance,
    create_session,
    current_view,
    go_back,
    is_complete,
    record_answer,
    remove_annotation,
    replay_events,
    submit_section,
)
from .errors import SchemaError, SurveyError
from .rng import fnv1a64, section_seed, seeded_shuffle
from .spec import (
    AnnotationTask,
    FreeText,
    MultiSelect,
    Numeric,
    OptionItem,
    Question,
    Section,
    SingleSelect,
    Slider,
    SurveySpec,
    Violation,
    canonical_serialize,
    decode_spec,
    parse_spec,
    validate_spec,
)
from .storage import Store

__all__ = [
    "Annotation",
    "AnnotationTask",
    "AnnotationVerdict",
    "Choice",
    "ChoiceSet",
    "Event",
    "FreeText",
    "MultiSelect",
    "Number",
    "Numeric",
    "OptionItem",
    "Question",
    "SchemaError",
    "Section",
    "Session",
    "SingleSelect",
    "Slider",
    "SliderPos",
    "Store",
    "SurveyError",
    "SurveySpec",
    "Text",
    "Violation",
    "WordSpan",
    "add_annotation",
    "advance",
    "canonical_serialize",
    "check_bounds",
    "check_overlap",
    "create_session",
    "current_view",
    "decode_spec",
    "fnv1a64",
    "go_back",
    "is_complete",
    "parse_spec",
    "record_answer",
    "remove_annotation",
    "replay_events",
    "section_seed",
    "seeded_shuffle",
    "snap_to_words",
    "submit_section",
    "tokenize_words",
    "validate_spec",
    "word_count",
]

__version__ = "0.1.0"

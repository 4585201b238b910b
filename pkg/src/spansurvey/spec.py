"""Declarative survey specification: types, parsing, validation, serialization.

A survey file is a UTF-8 JSON document. Top level:

    {
      "survey_id": "...",
      "title": "...",
      "sections": [
        {
          "section_id": "...",
          "label": "Annotation Task",
          "progress_noun": "Sentence",
          "ordering": "fixed" | "random",
          "allow_back": true,
          "questions": [
            {
              "question_id": "...",
              "prompt": "...",
              "instructions": "...",            # optional
              "instructions_url": "https://...", # optional, opened in a modal
              "annotation_task": {               # optional
                "text": "...",
                "min_words": 1,
                "max_words": 6,
                "required": false
              },
              "inputs": [ ... ]                  # optional, defaults to []
            }
          ]
        }
      ]
    }

Every input carries ``input_id``, ``type``, ``label`` and ``mandatory``;
the per-type fields are:

    single_select: options (>=2 of {"value", "display"})
    multi_select:  options (>=1), extensible, min_selections (default 0)
    numeric:       min_value, max_value, step
    slider:        left_label, right_label, positions
    free_text:     max_chars

``parse_spec`` fills defaults (annotation required=false, min_words=1,
allow_back=true, min_selections=0, inputs=[]) and rejects any spec with an
invariant violation. ``decode_spec`` + ``validate_spec`` do the same work in
two stages for tools that want the full violation list instead of the first
failure. ``canonical_serialize`` emits a deterministic byte representation:
schema key order, two-space indent, LF, trailing newline, defaults explicit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, SchemaError

ORDERING_FIXED = "fixed"
ORDERING_RANDOM = "random"

INPUT_SINGLE_SELECT = "single_select"
INPUT_MULTI_SELECT = "multi_select"
INPUT_NUMERIC = "numeric"
INPUT_SLIDER = "slider"
INPUT_FREE_TEXT = "free_text"


# -- domain types --------------------------------------------------------------

@dataclass
class OptionItem:
    value: str
    display: str


@dataclass
class InputSpec:
    """Common head of every input; concrete types below add their fields."""

    input_id: str
    label: str
    mandatory: bool


@dataclass
class SingleSelect(InputSpec):
    options: list[OptionItem] = field(default_factory=list)


@dataclass
class MultiSelect(InputSpec):
    options: list[OptionItem] = field(default_factory=list)
    extensible: bool = False
    min_selections: int = 0


@dataclass
class Numeric(InputSpec):
    min_value: int = 0
    max_value: int = 0
    step: int = 1


@dataclass
class Slider(InputSpec):
    left_label: str = ""
    right_label: str = ""
    positions: int = 2


@dataclass
class FreeText(InputSpec):
    max_chars: int = 1


@dataclass
class AnnotationTask:
    text: str
    min_words: int = 1
    max_words: int = 1
    required: bool = False


@dataclass
class Question:
    question_id: str
    prompt: str
    instructions: str | None = None
    instructions_url: str | None = None
    annotation_task: AnnotationTask | None = None
    inputs: list[InputSpec] = field(default_factory=list)


@dataclass
class Section:
    section_id: str
    label: str
    progress_noun: str
    ordering: str
    allow_back: bool = True
    questions: list[Question] = field(default_factory=list)


@dataclass
class SurveySpec:
    survey_id: str
    title: str
    sections: list[Section] = field(default_factory=list)


@dataclass
class Violation:
    """One broken invariant: where, which rule, and a human explanation."""

    path: str
    rule: str
    message: str


# -- decoding (syntax + structure + defaults) ----------------------------------

def _expect_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {_kind(value)}")
    return value


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected an array, got {_kind(value)}")
    return value


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {_kind(value)}")
    return value


def _expect_int(value, path: str) -> int:
    # bool is a subclass of int; it is never a legal integer here
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(path, f"expected an integer, got {_kind(value)}")
    return value


def _expect_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(path, f"expected a boolean, got {_kind(value)}")
    return value


def _kind(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    return "object"


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(path, f"missing required key '{key}'")
    return obj[key]


def _reject_unknown(obj: dict, allowed: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown key")


def _decode_option(raw, path: str) -> OptionItem:
    obj = _expect_object(raw, path)
    _reject_unknown(obj, {"value", "display"}, path)
    return OptionItem(
        value=_expect_str(_require(obj, "value", path), f"{path}.value"),
        display=_expect_str(_require(obj, "display", path), f"{path}.display"),
    )


_COMMON_INPUT_KEYS = {"input_id", "type", "label", "mandatory"}

_INPUT_KEYS = {
    INPUT_SINGLE_SELECT: _COMMON_INPUT_KEYS | {"options"},
    INPUT_MULTI_SELECT: _COMMON_INPUT_KEYS | {"options", "extensible", "min_selections"},
    INPUT_NUMERIC: _COMMON_INPUT_KEYS | {"min_value", "max_value", "step"},
    INPUT_SLIDER: _COMMON_INPUT_KEYS | {"left_label", "right_label", "positions"},
    INPUT_FREE_TEXT: _COMMON_INPUT_KEYS | {"max_chars"},
}


def _decode_input(raw, path: str) -> InputSpec:
    obj = _expect_object(raw, path)
    itype = _expect_str(_require(obj, "type", path), f"{path}.type")
    if itype not in _INPUT_KEYS:
        raise SchemaError(f"{path}.type", f"unknown input type '{itype}'")
    _reject_unknown(obj, _INPUT_KEYS[itype], path)

    input_id = _expect_str(_require(obj, "input_id", path), f"{path}.input_id")
    label = _expect_str(_require(obj, "label", path), f"{path}.label")
    mandatory = _expect_bool(_require(obj, "mandatory", path), f"{path}.mandatory")

    if itype == INPUT_SINGLE_SELECT:
        options_raw = _expect_list(_require(obj, "options", path), f"{path}.options")
        options = [
            _decode_option(o, f"{path}.options[{i}]") for i, o in enumerate(options_raw)
        ]
        return SingleSelect(input_id, label, mandatory, options)

    if itype == INPUT_MULTI_SELECT:
        options_raw = _expect_list(_require(obj, "options", path), f"{path}.options")
        options = [
            _decode_option(o, f"{path}.options[{i}]") for i, o in enumerate(options_raw)
        ]
        extensible = _expect_bool(
            _require(obj, "extensible", path), f"{path}.extensible"
        )
        min_selections = 0
        if "min_selections" in obj:
            min_selections = _expect_int(obj["min_selections"], f"{path}.min_selections")
        return MultiSelect(input_id, label, mandatory, options, extensible, min_selections)

    if itype == INPUT_NUMERIC:
        return Numeric(
            input_id,
            label,
            mandatory,
            min_value=_expect_int(_require(obj, "min_value", path), f"{path}.min_value"),
            max_value=_expect_int(_require(obj, "max_value", path), f"{path}.max_value"),
            step=_expect_int(_require(obj, "step", path), f"{path}.step"),
        )

    if itype == INPUT_SLIDER:
        return Slider(
            input_id,
            label,
            mandatory,
            left_label=_expect_str(_require(obj, "left_label", path), f"{path}.left_label"),
            right_label=_expect_str(_require(obj, "right_label", path), f"{path}.right_label"),
            positions=_expect_int(_require(obj, "positions", path), f"{path}.positions"),
        )

    return FreeText(
        input_id,
        label,
        mandatory,
        max_chars=_expect_int(_require(obj, "max_chars", path), f"{path}.max_chars"),
    )


def _decode_annotation_task(raw, path: str) -> AnnotationTask:
    obj = _expect_object(raw, path)
    _reject_unknown(obj, {"text", "min_words", "max_words", "required"}, path)
    min_words = 1
    if "min_words" in obj:
        min_words = _expect_int(obj["min_words"], f"{path}.min_words")
    required = False
    if "required" in obj:
        required = _expect_bool(obj["required"], f"{path}.required")
    return AnnotationTask(
        text=_expect_str(_require(obj, "text", path), f"{path}.text"),
        min_words=min_words,
        max_words=_expect_int(_require(obj, "max_words", path), f"{path}.max_words"),
        required=required,
    )


def _decode_question(raw, path: str) -> Question:
    obj = _expect_object(raw, path)
    _reject_unknown(
        obj,
        {"question_id", "prompt", "instructions", "instructions_url",
         "annotation_task", "inputs"},
        path,
    )
    instructions = None
    if "instructions" in obj:
        instructions = _expect_str(obj["instructions"], f"{path}.instructions")
    instructions_url = None
    if "instructions_url" in obj:
        instructions_url = _expect_str(obj["instructions_url"], f"{path}.instructions_url")
    annotation_task = None
    if "annotation_task" in obj:
        annotation_task = _decode_annotation_task(
            obj["annotation_task"], f"{path}.annotation_task"
        )
    inputs: list[InputSpec] = []
    if "inputs" in obj:
        inputs_raw = _expect_list(obj["inputs"], f"{path}.inputs")
        inputs = [
            _decode_input(inp, f"{path}.inputs[{i}]") for i, inp in enumerate(inputs_raw)
        ]
    return Question(
        question_id=_expect_str(_require(obj, "question_id", path), f"{path}.question_id"),
        prompt=_expect_str(_require(obj, "prompt", path), f"{path}.prompt"),
        instructions=instructions,
        instructions_url=instructions_url,
        annotation_task=annotation_task,
        inputs=inputs,
    )


def _decode_section(raw, path: str) -> Section:
    obj = _expect_object(raw, path)
    _reject_unknown(
        obj,
        {"section_id", "label", "progress_noun", "ordering", "allow_back", "questions"},
        path,
    )
    ordering = _expect_str(_require(obj, "ordering", path), f"{path}.ordering")
    if ordering not in (ORDERING_FIXED, ORDERING_RANDOM):
        raise SchemaError(f"{path}.ordering", f"must be 'fixed' or 'random', got '{ordering}'")
    allow_back = True
    if "allow_back" in obj:
        allow_back = _expect_bool(obj["allow_back"], f"{path}.allow_back")
    questions_raw = _expect_list(_require(obj, "questions", path), f"{path}.questions")
    return Section(
        section_id=_expect_str(_require(obj, "section_id", path), f"{path}.section_id"),
        label=_expect_str(_require(obj, "label", path), f"{path}.label"),
        progress_noun=_expect_str(_require(obj, "progress_noun", path), f"{path}.progress_noun"),
        ordering=ordering,
        allow_back=allow_back,
        questions=[
            _decode_question(q, f"{path}.questions[{i}]")
            for i, q in enumerate(questions_raw)
        ],
    )


def decode_spec(raw: str) -> SurveySpec:
    """Decode spec text into typed values, filling defaults.

    Enforces syntax and structure only; invariant checking is
    ``validate_spec``'s job. Raises ParseError / SchemaError.
    """
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc
    obj = _expect_object(doc, "$")
    _reject_unknown(obj, {"survey_id", "title", "sections"}, "$")
    sections_raw = _expect_list(_require(obj, "sections", "$"), "$.sections")
    return SurveySpec(
        survey_id=_expect_str(_require(obj, "survey_id", "$"), "$.survey_id"),
        title=_expect_str(_require(obj, "title", "$"), "$.title"),
        sections=[
            _decode_section(s, f"$.sections[{i}]") for i, s in enumerate(sections_raw)
        ],
    )


# -- validation ----------------------------------------------------------------

def _validate_input(inp: InputSpec, path: str, out: list[Violation]) -> None:
    if isinstance(inp, (SingleSelect, MultiSelect)):
        minimum = 2 if isinstance(inp, SingleSelect) else 1
        if len(inp.options) < minimum:
            out.append(Violation(
                f"{path}.options", "option_count",
                f"needs at least {minimum} options, has {len(inp.options)}",
            ))
        seen: dict[str, int] = {}
        for i, opt in enumerate(inp.options):
            if not opt.value:
                out.append(Violation(
                    f"{path}.options[{i}].value", "option_value_nonempty",
                    "option value must be non-empty",
                ))
            elif opt.value in seen:
                out.append(Violation(
                    f"{path}.options[{i}].value", "option_values_unique",
                    f"option value '{opt.value}' already used at "
                    f"{path}.options[{seen[opt.value]}].value",
                ))
            else:
                seen[opt.value] = i
    if isinstance(inp, MultiSelect):
        if inp.min_selections < 0:
            out.append(Violation(
                f"{path}.min_selections", "min_selections_nonnegative",
                "min_selections must be >= 0",
            ))
        elif not inp.extensible and inp.min_selections > len(inp.options):
            out.append(Violation(
                f"{path}.min_selections", "min_selections_cardinality",
                f"min_selections={inp.min_selections} exceeds the {len(inp.options)} "
                "available options and the input is not extensible",
            ))
    if isinstance(inp, Numeric):
        if inp.min_value >= inp.max_value:
            out.append(Violation(
                f"{path}.min_value", "numeric_range",
                f"min_value={inp.min_value} must be < max_value={inp.max_value}",
            ))
        if inp.step < 1:
            out.append(Violation(
                f"{path}.step", "numeric_step", "step must be >= 1",
            ))
    if isinstance(inp, Slider) and inp.positions < 2:
        out.append(Violation(
            f"{path}.positions", "slider_positions", "positions must be >= 2",
        ))
    if isinstance(inp, FreeText) and inp.max_chars < 1:
        out.append(Violation(
            f"{path}.max_chars", "free_text_max_chars", "max_chars must be >= 1",
        ))


def _validate_question(q: Question, path: str, out: list[Violation]) -> None:
    if q.annotation_task is None and not q.inputs:
        out.append(Violation(
            path, "question_content",
            "question needs an annotation_task or at least one input",
        ))
    task = q.annotation_task
    if task is not None:
        tpath = f"{path}.annotation_task"
        if not task.text.strip():
            out.append(Violation(
                f"{tpath}.text", "annotation_text_nonempty",
                "annotation text must be non-empty",
            ))
        if task.min_words < 1:
            out.append(Violation(
                f"{tpath}.min_words", "word_bounds", "min_words must be >= 1",
            ))
        elif task.max_words < task.min_words:
            out.append(Violation(
                f"{tpath}.max_words", "word_bounds",
                f"max_words={task.max_words} must be >= min_words={task.min_words}",
            ))
    seen: dict[str, int] = {}
    for i, inp in enumerate(q.inputs):
        ipath = f"{path}.inputs[{i}]"
        if inp.input_id in seen:
            out.append(Violation(
                f"{ipath}.input_id", "input_id_unique",
                f"input_id '{inp.input_id}' already used at "
                f"{path}.inputs[{seen[inp.input_id]}].input_id",
            ))
        else:
            seen[inp.input_id] = i
        _validate_input(inp, ipath, out)


def validate_spec(spec: SurveySpec) -> list[Violation]:
    """All invariant violations in ``spec``; empty iff the spec is valid."""
    out: list[Violation] = []
    if not spec.survey_id:
        out.append(Violation("$.survey_id", "survey_id_nonempty",
                             "survey_id must be non-empty"))
    if not spec.sections:
        out.append(Violation("$.sections", "sections_nonempty",
                             "survey needs at least one section"))
    seen_sections: dict[str, str] = {}
    seen_questions: dict[str, str] = {}
    for si, sec in enumerate(spec.sections):
        spath = f"$.sections[{si}]"
        if sec.section_id in seen_sections:
            out.append(Violation(
                f"{spath}.section_id", "section_id_unique",
                f"section_id '{sec.section_id}' already used at "
                f"{seen_sections[sec.section_id]}",
            ))
        else:
            seen_sections[sec.section_id] = f"{spath}.section_id"
        if not sec.progress_noun:
            out.append(Violation(
                f"{spath}.progress_noun", "progress_noun_nonempty",
                "progress_noun must be non-empty",
            ))
        if not sec.questions:
            out.append(Violation(
                f"{spath}.questions", "questions_nonempty",
                "section needs at least one question",
            ))
        for qi, q in enumerate(sec.questions):
            qpath = f"{spath}.questions[{qi}]"
            if q.question_id in seen_questions:
                out.append(Violation(
                    f"{qpath}.question_id", "question_id_unique",
                    f"question_id '{q.question_id}' already used at "
                    f"{seen_questions[q.question_id]}",
                ))
            else:
                seen_questions[q.question_id] = f"{qpath}.question_id"
            _validate_question(q, qpath, out)
    return out


def parse_spec(raw: str) -> SurveySpec:
    """Decode and fully validate spec text; raise on the first problem."""
    spec = decode_spec(raw)
    violations = validate_spec(spec)
    if violations:
        raise SchemaError(violations[0].path, violations[0].message)
    return spec


# -- canonical serialization ----------------------------------------------------

def _input_to_dict(inp: InputSpec) -> dict:
    d = {"input_id": inp.input_id}
    if isinstance(inp, SingleSelect):
        d["type"] = INPUT_SINGLE_SELECT
    elif isinstance(inp, MultiSelect):
        d["type"] = INPUT_MULTI_SELECT
    elif isinstance(inp, Numeric):
        d["type"] = INPUT_NUMERIC
    elif isinstance(inp, Slider):
        d["type"] = INPUT_SLIDER
    elif isinstance(inp, FreeText):
        d["type"] = INPUT_FREE_TEXT
    else:
        raise TypeError(f"unknown input spec {type(inp).__name__}")
    d["label"] = inp.label
    d["mandatory"] = inp.mandatory
    if isinstance(inp, (SingleSelect, MultiSelect)):
        d["options"] = [{"value": o.value, "display": o.display} for o in inp.options]
    if isinstance(inp, MultiSelect):
        d["extensible"] = inp.extensible
        d["min_selections"] = inp.min_selections
    if isinstance(inp, Numeric):
        d["min_value"] = inp.min_value
        d["max_value"] = inp.max_value
        d["step"] = inp.step
    if isinstance(inp, Slider):
        d["left_label"] = inp.left_label
        d["right_label"] = inp.right_label
        d["positions"] = inp.positions
    if isinstance(inp, FreeText):
        d["max_chars"] = inp.max_chars
    return d


def question_to_dict(q: Question) -> dict:
    d: dict = {"question_id": q.question_id, "prompt": q.prompt}
    if q.instructions is not None:
        d["instructions"] = q.instructions
    if q.instructions_url is not None:
        d["instructions_url"] = q.instructions_url
    if q.annotation_task is not None:
        t = q.annotation_task
        d["annotation_task"] = {
            "text": t.text,
            "min_words": t.min_words,
            "max_words": t.max_words,
            "required": t.required,
        }
    d["inputs"] = [_input_to_dict(i) for i in q.inputs]
    return d


def spec_to_dict(spec: SurveySpec) -> dict:
    return {
        "survey_id": spec.survey_id,
        "title": spec.title,
        "sections": [
            {
                "section_id": s.section_id,
                "label": s.label,
                "progress_noun": s.progress_noun,
                "ordering": s.ordering,
                "allow_back": s.allow_back,
                "questions": [question_to_dict(q) for q in s.questions],
            }
            for s in spec.sections
        ],
    }


def canonical_serialize(spec: SurveySpec) -> str:
    """Deterministic text form: equal specs always serialize byte-identically."""
    return json.dumps(spec_to_dict(spec), indent=2, ensure_ascii=False) + "\n"

import json
from pathlib import Path

import pytest

from spansurvey.spec import SurveySpec, parse_spec
from spansurvey.storage import Store

REPO_ROOT = Path(__file__).resolve().parents[1]
DEMO_PATH = REPO_ROOT / "demo" / "media_bias.survey"

# Sentence shown in the annotation screenshots; doubles as a fixed test text.
HAWLEY = (
    "But it was Hawley's keynote address at the National Conservatism "
    "Conference that nailed down who he is, what he believes, and where "
    "his party is going in a way that should be absolutely terrifying "
    "for every American."
)

FIXED_NOW = "2026-08-19T12:00:00.000000Z"


@pytest.fixture(scope="session")
def demo_raw() -> str:
    return DEMO_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def demo_survey(demo_raw) -> SurveySpec:
    return parse_spec(demo_raw)


@pytest.fixture()
def store(tmp_path) -> Store:
    s = Store(tmp_path / "survey.db")
    yield s
    s.close()


def tiny_spec_doc() -> dict:
    """A two-section survey small enough to reason about by hand."""
    return {
        "survey_id": "tiny",
        "title": "Tiny survey",
        "sections": [
            {
                "section_id": "mark",
                "label": "Marking",
                "progress_noun": "Item",
                "ordering": "fixed",
                "allow_back": False,
                "questions": [
                    {
                        "question_id": "m1",
                        "prompt": "Mark the loaded words.",
                        "annotation_task": {
                            "text": "alpha beta gamma delta",
                            "min_words": 1,
                            "max_words": 2,
                            "required": False,
                        },
                        "inputs": [
                            {
                                "type": "single_select",
                                "input_id": "verdict",
                                "label": "Loaded?",
                                "mandatory": True,
                                "options": [
                                    {"value": "yes", "display": "Yes"},
                                    {"value": "no", "display": "No"},
                                ],
                            }
                        ],
                    },
                    {
                        "question_id": "m2",
                        "prompt": "Optional notes.",
                        "inputs": [
                            {
                                "type": "free_text",
                                "input_id": "notes",
                                "label": "Notes",
                                "mandatory": False,
                                "max_chars": 40,
                            }
                        ],
                    },
                ],
            },
            {
                "section_id": "about",
                "label": "About you",
                "progress_noun": "Question",
                "ordering": "fixed",
                "allow_back": True,
                "questions": [
                    {
                        "question_id": "years",
                        "prompt": "Years of experience?",
                        "inputs": [
                            {
                                "type": "numeric",
                                "input_id": "years",
                                "label": "Years",
                                "mandatory": True,
                                "min_value": 0,
                                "max_value": 50,
                                "step": 1,
                            }
                        ],
                    }
                ],
            },
        ],
    }


@pytest.fixture()
def tiny_raw() -> str:
    return json.dumps(tiny_spec_doc())


@pytest.fixture()
def tiny_survey(tiny_raw) -> SurveySpec:
    return parse_spec(tiny_raw)

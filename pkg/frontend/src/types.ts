// Wire types for the spansurvey participant API. These mirror the JSON the
// server actually sends; nothing here is derived locally.

export interface OptionDoc {
    value: string;
    display: string;
}

export interface SingleSelectDoc {
    type: "single_select";
    input_id: string;
    label: string;
    mandatory: boolean;
    options: OptionDoc[];
}

export interface MultiSelectDoc {
    type: "multi_select";
    input_id: string;
    label: string;
    mandatory: boolean;
    options: OptionDoc[];
    extensible: boolean;
    min_selections: number;
}

export interface NumericDoc {
    type: "numeric";
    input_id: string;
    label: string;
    mandatory: boolean;
    min_value: number;
    max_value: number;
    step: number;
}

export interface SliderDoc {
    type: "slider";
    input_id: string;
    label: string;
    mandatory: boolean;
    left_label: string;
    right_label: string;
    positions: number;
}

export interface FreeTextDoc {
    type: "free_text";
    input_id: string;
    label: string;
    mandatory: boolean;
    max_chars: number;
}

export type InputDoc =
    | SingleSelectDoc
    | MultiSelectDoc
    | NumericDoc
    | SliderDoc
    | FreeTextDoc;

export interface AnnotationTaskDoc {
    text: string;
    min_words: number;
    max_words: number;
    required: boolean;
}

export interface QuestionDoc {
    question_id: string;
    prompt: string;
    instructions?: string;
    instructions_url?: string;
    annotation_task?: AnnotationTaskDoc;
    inputs: InputDoc[];
}

// Answers are a tagged union, same shape in both directions.
export type AnswerValue =
    | { type: "choice"; value: string }
    | { type: "choice_set"; values: string[]; free_additions: string[] }
    | { type: "number"; value: number }
    | { type: "slider"; position: number }
    | { type: "text"; value: string };

export interface AnnotationDoc {
    annotation_id: string;
    question_id: string;
    start: number;
    end: number;
    extracted: string;
    word_count: number;
}

export interface NavDoc {
    can_prev: boolean;
    can_next: boolean;
    can_submit: boolean;
}

export interface ProgressDoc {
    section_label: string;
    progress_noun: string;
    index: number;
    total: number;
}

export interface ViewDoc {
    complete: false;
    survey_id: string;
    session_token: string;
    section_id: string;
    question: QuestionDoc;
    answers: Record<string, AnswerValue>;
    annotations: AnnotationDoc[];
    progress: ProgressDoc;
    nav: NavDoc;
}

export interface CompletionDoc {
    complete: true;
    survey_id: string;
    session_token: string;
}

export type CurrentDoc = ViewDoc | CompletionDoc;

/** POST /annotations response; the view doc carries flat start/end instead. */
export interface AnnotationCreated {
    annotation_id: string;
    span: { start: number; end: number };
    extracted: string;
    word_count: number;
}

export interface ErrorEnvelope {
    status: number;
    code: string;
    message: string;
    details: string[];
}

// Shared survey fixture for the UI tests: twenty annotation sentences, a
// background section, and a news section, matching the wire shapes the real
// server produces. Section order is fixed so scripted runs are stable.

import type { InputDoc, QuestionDoc } from "../src/types.js";

export const HAWLEY =
    "But it was Hawley's keynote address at the National Conservatism "
    + "Conference that nailed down who he is, what he believes, and where "
    + "his party is going in a way that should be absolutely terrifying "
    + "for every American.";

// One sentence with astral-plane characters so UTF-16 and scalar offsets
// genuinely differ on screen.
export const EMOJI_SENTENCE =
    "The 🦉 owl 🦉 of Minerva spreads its wings only with the falling of dusk.";

export interface MockSection {
    section_id: string;
    label: string;
    progress_noun: string;
    allow_back: boolean;
    questions: QuestionDoc[];
}

export interface MockSurvey {
    survey_id: string;
    title: string;
    sections: MockSection[];
}

function biasSelect(): InputDoc {
    return {
        type: "single_select",
        input_id: "bias",
        label: "Do you consider the sentence to be biased or unbiased?",
        mandatory: true,
        options: [
            { value: "biased", display: "Biased" },
            { value: "unbiased", display: "Unbiased" },
        ],
    };
}

function sentence(k: number, text: string): QuestionDoc {
    return {
        question_id: `s${String(k).padStart(2, "0")}`,
        prompt: "Read the sentence and mark any words or phrases that make "
            + "it sound biased to you.",
        instructions: "Marking is optional. A mark may cover at most six words.",
        annotation_task: { text, min_words: 1, max_words: 6, required: false },
        inputs: [biasSelect()],
    };
}

export function buildSurvey(): MockSurvey {
    const sentences: QuestionDoc[] = [];
    for (let k = 1; k <= 20; k += 1) {
        let text: string;
        if (k === 1) {
            text = HAWLEY;
        } else if (k === 7) {
            text = EMOJI_SENTENCE;
        } else {
            text = `Sentence number ${k} reads plainly and says very little of note.`;
        }
        sentences.push(sentence(k, text));
    }
    return {
        survey_id: "ui_demo",
        title: "Perceptions of Bias in News Sentences",
        sections: [
            {
                section_id: "annotate",
                label: "Annotation Task",
                progress_noun: "Sentence",
                allow_back: false,
                questions: sentences,
            },
            {
                section_id: "background",
                label: "Personal Background",
                progress_noun: "Question",
                allow_back: true,
                questions: [
                    {
                        question_id: "age",
                        prompt: "What is your age?",
                        instructions: "Please type in your answer or use the "
                            + "arrow buttons to select your age.",
                        inputs: [{
                            type: "numeric",
                            input_id: "age",
                            label: "Age in years",
                            mandatory: true,
                            min_value: 0,
                            max_value: 120,
                            step: 1,
                        }],
                    },
                    {
                        question_id: "occupation",
                        prompt: "What is your occupation?",
                        inputs: [{
                            type: "free_text",
                            input_id: "occupation",
                            label: "Occupation",
                            mandatory: false,
                            max_chars: 120,
                        }],
                    },
                ],
            },
            {
                section_id: "news",
                label: "Personal News Consumption",
                progress_noun: "Question",
                allow_back: true,
                questions: [
                    {
                        question_id: "leaning",
                        prompt: "How would you describe your political view?",
                        inputs: [{
                            type: "slider",
                            input_id: "leaning",
                            label: "Political leaning",
                            mandatory: true,
                            left_label: "Very liberal",
                            right_label: "Very conservative",
                            positions: 7,
                        }],
                    },
                    {
                        question_id: "outlets",
                        prompt: "Please select AT LEAST one news outlets that you follow.",
                        instructions: "You can select more than one option.",
                        inputs: [{
                            type: "multi_select",
                            input_id: "outlets",
                            label: "News outlets",
                            mandatory: true,
                            extensible: true,
                            min_selections: 1,
                            options: [
                                { value: "cnn", display: "CNN" },
                                { value: "fox_news", display: "Fox News" },
                                { value: "new_york_times", display: "New York Times" },
                            ],
                        }],
                    },
                ],
            },
        ],
    };
}

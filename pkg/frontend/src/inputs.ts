// DOM controls for each input kind. Every renderer receives the stored
// answer (if any) and reports changes upward as complete wire values; no
// input talks to the network itself.
//
// Each block carries data-input-id, data-input-type and data-answered so
// the on-screen state can be read back independently of app internals.

import type {
    AnswerValue,
    FreeTextDoc,
    InputDoc,
    MultiSelectDoc,
    NumericDoc,
    SingleSelectDoc,
    SliderDoc,
} from "./types.js";

export type AnswerFn = (inputId: string, value: AnswerValue) => void;

function block(doc: InputDoc, answered: boolean): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "input-block";
    wrap.dataset.inputId = doc.input_id;
    wrap.dataset.inputType = doc.type;
    wrap.dataset.answered = answered ? "true" : "false";
    const label = document.createElement("p");
    label.className = "input-label";
    label.textContent = doc.label;
    if (doc.mandatory) {
        const star = document.createElement("span");
        star.className = "mandatory-mark";
        star.textContent = " *";
        label.appendChild(star);
    }
    wrap.appendChild(label);
    return wrap;
}

function renderSingleSelect(
    doc: SingleSelectDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    const chosen = value && value.type === "choice" ? value.value : null;
    const wrap = block(doc, chosen !== null);
    const row = document.createElement("div");
    row.className = "option-row";
    for (const opt of doc.options) {
        const btn = document.createElement("button");
        btn.type = "button";
        btn.className = "option-btn" + (opt.value === chosen ? " selected" : "");
        btn.dataset.value = opt.value;
        btn.textContent = opt.display;
        btn.addEventListener("click", () => {
            onAnswer(doc.input_id, { type: "choice", value: opt.value });
        });
        row.appendChild(btn);
    }
    wrap.appendChild(row);
    return wrap;
}

function renderMultiSelect(
    doc: MultiSelectDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    const current = value && value.type === "choice_set"
        ? value
        : { type: "choice_set" as const, values: [], free_additions: [] };
    const wrap = block(doc, value !== undefined);
    const grid = document.createElement("div");
    grid.className = "option-grid";
    for (const opt of doc.options) {
        const on = current.values.includes(opt.value);
        const btn = document.createElement("button");
        btn.type = "button";
        btn.className = "option-btn" + (on ? " selected" : "");
        btn.dataset.value = opt.value;
        btn.textContent = opt.display;
        btn.addEventListener("click", () => {
            const values = on
                ? current.values.filter((v) => v !== opt.value)
                : [...current.values, opt.value];
            onAnswer(doc.input_id, {
                type: "choice_set", values,
                free_additions: [...current.free_additions],
            });
        });
        grid.appendChild(btn);
    }
    for (const extra of current.free_additions) {
        const btn = document.createElement("button");
        btn.type = "button";
        btn.className = "option-btn selected free-addition";
        btn.dataset.freeValue = extra;
        btn.textContent = extra;
        btn.title = "Remove this entry";
        btn.addEventListener("click", () => {
            onAnswer(doc.input_id, {
                type: "choice_set",
                values: [...current.values],
                free_additions: current.free_additions.filter((v) => v !== extra),
            });
        });
        grid.appendChild(btn);
    }
    wrap.appendChild(grid);
    if (doc.extensible) {
        const row = document.createElement("div");
        row.className = "add-row";
        const field = document.createElement("input");
        field.type = "text";
        field.className = "add-input";
        field.placeholder = "Other…";
        const add = document.createElement("button");
        add.type = "button";
        add.className = "add-btn";
        add.textContent = "+ ADD";
        add.addEventListener("click", () => {
            const entry = field.value.trim();
            if (!entry || current.free_additions.includes(entry)) return;
            onAnswer(doc.input_id, {
                type: "choice_set",
                values: [...current.values],
                free_additions: [...current.free_additions, entry],
            });
        });
        row.appendChild(field);
        row.appendChild(add);
        wrap.appendChild(row);
    }
    return wrap;
}

function renderNumeric(
    doc: NumericDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    const current = value && value.type === "number" ? value.value : null;
    const wrap = block(doc, current !== null);
    const row = document.createElement("div");
    row.className = "numeric-row";

    const clamp = (n: number): number => {
        const snapped = doc.min_value
            + Math.round((n - doc.min_value) / doc.step) * doc.step;
        return Math.min(doc.max_value, Math.max(doc.min_value, snapped));
    };
    const send = (n: number) => onAnswer(doc.input_id, { type: "number", value: n });

    const down = document.createElement("button");
    down.type = "button";
    down.className = "step-btn step-down";
    down.textContent = "▼";
    const field = document.createElement("input");
    field.type = "number";
    field.className = "numeric-field";
    field.min = String(doc.min_value);
    field.max = String(doc.max_value);
    field.step = String(doc.step);
    if (current !== null) field.value = String(current);
    const up = document.createElement("button");
    up.type = "button";
    up.className = "step-btn step-up";
    up.textContent = "▲";

    down.addEventListener("click", () => {
        send(clamp((current ?? doc.min_value + doc.step) - doc.step));
    });
    up.addEventListener("click", () => {
        send(clamp((current ?? doc.min_value - doc.step) + doc.step));
    });
    field.addEventListener("change", () => {
        const n = Number.parseInt(field.value, 10);
        if (Number.isNaN(n)) {
            field.value = current === null ? "" : String(current);
            return;
        }
        send(clamp(n));
    });

    row.appendChild(down);
    row.appendChild(field);
    row.appendChild(up);
    wrap.appendChild(row);
    return wrap;
}

function renderSlider(
    doc: SliderDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    const current = value && value.type === "slider" ? value.position : null;
    const wrap = block(doc, current !== null);
    const row = document.createElement("div");
    row.className = "slider-row";
    const left = document.createElement("span");
    left.className = "slider-label slider-label-left";
    left.textContent = doc.left_label;
    const range = document.createElement("input");
    range.type = "range";
    range.className = "slider-field" + (current === null ? " untouched" : "");
    range.min = "0";
    range.max = String(doc.positions - 1);
    range.step = "1";
    range.value = String(current ?? 0);
    range.addEventListener("change", () => {
        onAnswer(doc.input_id, { type: "slider", position: Number(range.value) });
    });
    const right = document.createElement("span");
    right.className = "slider-label slider-label-right";
    right.textContent = doc.right_label;
    row.appendChild(left);
    row.appendChild(range);
    row.appendChild(right);
    wrap.appendChild(row);
    return wrap;
}

function renderFreeText(
    doc: FreeTextDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    const current = value && value.type === "text" ? value.value : null;
    const wrap = block(doc, current !== null);
    const area = document.createElement("textarea");
    area.className = "free-text";
    area.maxLength = doc.max_chars;
    area.rows = 3;
    if (current !== null) area.value = current;
    area.addEventListener("change", () => {
        if (area.value === (current ?? "")) return;
        onAnswer(doc.input_id, { type: "text", value: area.value });
    });
    wrap.appendChild(area);
    return wrap;
}

export function renderInput(
    doc: InputDoc, value: AnswerValue | undefined, onAnswer: AnswerFn,
): HTMLElement {
    switch (doc.type) {
        case "single_select":
            return renderSingleSelect(doc, value, onAnswer);
        case "multi_select":
            return renderMultiSelect(doc, value, onAnswer);
        case "numeric":
            return renderNumeric(doc, value, onAnswer);
        case "slider":
            return renderSlider(doc, value, onAnswer);
        case "free_text":
            return renderFreeText(doc, value, onAnswer);
    }
}

// Utilities shared by the UI test suites: boot the app against the mock
// server, drive text selections through real DOM ranges, and read the
// on-screen state back without peeking at app internals.

import { vi } from "vitest";
import { Client } from "../src/api.js";
import { App } from "../src/app.js";
import { scalarToUtf16 } from "../src/offsets.js";
import type { AnswerValue, CurrentDoc } from "../src/types.js";
import { MockServer } from "./mock_server.js";
import { buildSurvey } from "./fixtures.js";

export async function flush(times = 20): Promise<void> {
    for (let i = 0; i < times; i += 1) {
        await Promise.resolve();
    }
}

export interface Harness {
    server: MockServer;
    app: App;
    root: HTMLElement;
}

export async function startApp(server?: MockServer): Promise<Harness> {
    const srv = server ?? new MockServer(buildSurvey());
    vi.stubGlobal("fetch", srv.fetch);
    const root = document.createElement("div");
    root.id = "root";
    document.body.appendChild(root);
    const app = await App.start(root, new Client(), { surveyId: "ui_demo" });
    return { server: srv, app, root };
}

export function teardown(h: Harness): void {
    h.app.destroy();
    h.root.remove();
    vi.unstubAllGlobals();
    window.getSelection()?.removeAllRanges();
}

/** Boundary point (node, offset) for a UTF-16 offset into the task text. */
function pointAt(container: HTMLElement, u16: number): { node: Node; offset: number } {
    const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
    let seen = 0;
    let last: Text | null = null;
    for (let node = walker.nextNode(); node; node = walker.nextNode()) {
        const text = node as Text;
        if (u16 <= seen + text.length) {
            return { node: text, offset: u16 - seen };
        }
        seen += text.length;
        last = text;
    }
    if (last && u16 === seen) {
        return { node: last, offset: last.length };
    }
    throw new Error(`offset ${u16} beyond task text of length ${seen}`);
}

/**
 * Select [start, end) scalar offsets of the current task text the way a
 * pointer drag would: set the browser selection, fire selectionchange, and
 * optionally release the mouse.
 */
export function selectSpan(
    root: HTMLElement, text: string, start: number, end: number,
    opts: { release?: boolean } = {},
): void {
    const container = root.querySelector<HTMLElement>("#task-text");
    if (!container) throw new Error("no task text on screen");
    const from = pointAt(container, scalarToUtf16(text, start));
    const to = pointAt(container, scalarToUtf16(text, end));
    const range = document.createRange();
    range.setStart(from.node, from.offset);
    range.setEnd(to.node, to.offset);
    const sel = window.getSelection();
    if (!sel) throw new Error("jsdom offers no selection");
    sel.removeAllRanges();
    sel.addRange(range);
    document.dispatchEvent(new Event("selectionchange"));
    if (opts.release !== false) {
        container.dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    }
}

export interface DomChip {
    annotation_id: string;
    start: number;
    end: number;
    extracted: string;
    hasRemove: boolean;
}

export interface DomState {
    complete: boolean;
    header: string | null;
    prompt: string | null;
    chips: DomChip[];
    answers: Record<string, AnswerValue>;
    prevDisabled: boolean | null;
    nextDisabled: boolean | null;
    submitDisabled: boolean | null;
    overlayKind: string | null;
}

/** Read what is actually on screen, from the DOM alone. */
export function readDom(root: HTMLElement): DomState {
    const header = root.querySelector(".progress-header");
    const chips: DomChip[] = [];
    for (const el of root.querySelectorAll<HTMLElement>("#task-text mark.chip")) {
        chips.push({
            annotation_id: el.dataset.annotationId ?? "",
            start: Number(el.dataset.start),
            end: Number(el.dataset.end),
            extracted: el.textContent ?? "",
            hasRemove: el.querySelector("button.chip-remove") !== null,
        });
    }

    const answers: Record<string, AnswerValue> = {};
    for (const blockEl of root.querySelectorAll<HTMLElement>(".input-block")) {
        if (blockEl.dataset.answered !== "true") continue;
        const id = blockEl.dataset.inputId ?? "";
        switch (blockEl.dataset.inputType) {
            case "single_select": {
                const sel = blockEl.querySelector<HTMLElement>(".option-btn.selected");
                if (sel?.dataset.value !== undefined) {
                    answers[id] = { type: "choice", value: sel.dataset.value };
                }
                break;
            }
            case "multi_select": {
                const values: string[] = [];
                const free: string[] = [];
                for (const btn of blockEl.querySelectorAll<HTMLElement>(".option-btn.selected")) {
                    if (btn.dataset.freeValue !== undefined) {
                        free.push(btn.dataset.freeValue);
                    } else if (btn.dataset.value !== undefined) {
                        values.push(btn.dataset.value);
                    }
                }
                answers[id] = { type: "choice_set", values, free_additions: free };
                break;
            }
            case "numeric": {
                const field = blockEl.querySelector<HTMLInputElement>(".numeric-field");
                if (field) answers[id] = { type: "number", value: Number(field.value) };
                break;
            }
            case "slider": {
                const field = blockEl.querySelector<HTMLInputElement>(".slider-field");
                if (field) answers[id] = { type: "slider", position: Number(field.value) };
                break;
            }
            case "free_text": {
                const area = blockEl.querySelector<HTMLTextAreaElement>(".free-text");
                if (area) answers[id] = { type: "text", value: area.value };
                break;
            }
            default:
                break;
        }
    }

    const btn = (sel: string): boolean | null => {
        const el = root.querySelector<HTMLButtonElement>(sel);
        return el ? el.disabled : null;
    };
    return {
        complete: root.querySelector(".completion-card") !== null,
        header: header ? header.textContent : null,
        prompt: root.querySelector(".prompt")?.textContent ?? null,
        chips,
        answers,
        prevDisabled: btn("#btn-prev"),
        nextDisabled: btn("#btn-next"),
        submitDisabled: btn("#btn-submit"),
        overlayKind: root.querySelector<HTMLElement>("#overlay")?.dataset.kind ?? null,
    };
}

/** Assert the rendered state equals the server's current document. */
export function expectParity(root: HTMLElement, doc: CurrentDoc): void {
    const dom = readDom(root);
    if (doc.complete) {
        if (!dom.complete) throw new Error("server is complete but the screen is not");
        return;
    }
    if (dom.complete) throw new Error("screen shows completion but the server does not");

    const expectHeader = `${doc.progress.section_label} — `
        + `${doc.progress.progress_noun} ${doc.progress.index} of ${doc.progress.total}`;
    if (dom.header !== expectHeader) {
        throw new Error(`header '${dom.header}' != '${expectHeader}'`);
    }
    if (dom.prompt !== doc.question.prompt) {
        throw new Error(`prompt mismatch on ${doc.question.question_id}`);
    }

    const domAnn = [...dom.chips]
        .map(({ annotation_id, start, end, extracted }) =>
            ({ annotation_id, start, end, extracted }))
        .sort((a, b) => a.start - b.start);
    const srvAnn = [...doc.annotations]
        .map(({ annotation_id, start, end, extracted }) =>
            ({ annotation_id, start, end, extracted }))
        .sort((a, b) => a.start - b.start);
    if (JSON.stringify(domAnn) !== JSON.stringify(srvAnn)) {
        throw new Error(`annotations differ on screen: `
            + `${JSON.stringify(domAnn)} != ${JSON.stringify(srvAnn)}`);
    }
    for (const chip of dom.chips) {
        if (!chip.hasRemove) {
            throw new Error(`chip ${chip.annotation_id} is missing its remove button`);
        }
    }

    const inputIds = doc.question.inputs.map((i) => i.input_id);
    for (const iid of inputIds) {
        const want = doc.answers[iid];
        const got = dom.answers[iid];
        if (JSON.stringify(want ?? null) !== JSON.stringify(got ?? null)) {
            throw new Error(`answer mismatch for ${iid}: `
                + `screen ${JSON.stringify(got)} != server ${JSON.stringify(want)}`);
        }
    }

    if (dom.nextDisabled === null) throw new Error("NEXT button is missing");
    if (dom.prevDisabled === null) throw new Error("PREVIOUS button is missing");
    if (dom.nextDisabled !== !doc.nav.can_next) {
        throw new Error(`NEXT disabled=${dom.nextDisabled} but can_next=${doc.nav.can_next}`);
    }
    if (dom.prevDisabled !== !doc.nav.can_prev) {
        throw new Error(`PREVIOUS disabled=${dom.prevDisabled} but can_prev=${doc.nav.can_prev}`);
    }
    const atLast = doc.progress.index === doc.progress.total;
    if (atLast && dom.submitDisabled === null) {
        throw new Error("SUBMIT button should be present on the last question");
    }
    if (!atLast && dom.submitDisabled !== null) {
        throw new Error("SUBMIT button should only appear on the last question");
    }
    if (atLast && dom.submitDisabled !== !doc.nav.can_submit) {
        throw new Error(`SUBMIT disabled=${dom.submitDisabled} `
            + `but can_submit=${doc.nav.can_submit}`);
    }
}

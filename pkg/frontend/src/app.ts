// Application shell: owns the view document, re-renders on every change,
// and forwards interactions to the API. Button enabled-states come straight
// from the server's nav flags (plus a transient lock while a request is in
// flight); nothing is gated by local guesswork.

import { ApiError, Client } from "./api.js";
import { renderTaskText, selectionToSpan } from "./annotator.js";
import { renderInput } from "./inputs.js";
import { SelectionBuffer } from "./selection.js";
import type { PendingSpan } from "./selection.js";
import type { AnswerValue, CurrentDoc } from "./types.js";

type Overlay =
    | { kind: "error"; title: string; message: string }
    | { kind: "retry"; message: string; span: PendingSpan }
    | { kind: "instructions" };

export interface StartOptions {
    token?: string;
    surveyId?: string;
}

export class App {
    private doc: CurrentDoc | null = null;
    private busy = false;
    private overlay: Overlay | null = null;
    private readonly buffer: SelectionBuffer;
    private readonly detach: Array<() => void> = [];

    private constructor(
        private readonly root: HTMLElement,
        private readonly client: Client,
        private readonly token: string,
    ) {
        this.buffer = new SelectionBuffer((span) => {
            void this.commitSpan(span);
        });
    }

    static async start(root: HTMLElement, client: Client, opts: StartOptions): Promise<App> {
        let token = opts.token;
        if (!token) {
            if (!opts.surveyId) {
                throw new Error("start() needs a session token or a survey id");
            }
            token = await client.createSession(opts.surveyId);
        }
        const app = new App(root, client, token);
        await app.refresh();
        app.render();
        app.listen();
        return app;
    }

    get sessionToken(): string {
        return this.token;
    }

    get currentDoc(): CurrentDoc | null {
        return this.doc;
    }

    destroy(): void {
        for (const off of this.detach) off();
        this.detach.length = 0;
        this.buffer.cancel();
    }

    // -- selection plumbing ---------------------------------------------------

    private listen(): void {
        const onChange = () => this.trackSelection(false);
        const onMouseUp = () => this.trackSelection(true);
        document.addEventListener("selectionchange", onChange);
        document.addEventListener("mouseup", onMouseUp);
        this.detach.push(() => document.removeEventListener("selectionchange", onChange));
        this.detach.push(() => document.removeEventListener("mouseup", onMouseUp));
    }

    private trackSelection(released: boolean): void {
        if (!this.doc || this.doc.complete || !this.doc.question.annotation_task) {
            return;
        }
        const el = this.root.querySelector<HTMLElement>("#task-text");
        if (!el) return;
        const span = selectionToSpan(el, this.doc.question.annotation_task.text);
        if (!span || span.start >= span.end) {
            this.buffer.cancel();
            return;
        }
        this.buffer.update(span.start, span.end);
        if (released) {
            this.buffer.release();
        }
    }

    // -- server round-trips ---------------------------------------------------

    private async refresh(): Promise<void> {
        try {
            this.doc = await this.client.current(this.token);
        } catch (err) {
            if (err instanceof ApiError && err.code === "session_complete") {
                const prev = this.doc && !this.doc.complete ? this.doc.survey_id : "";
                this.doc = { complete: true, survey_id: prev, session_token: this.token };
                return;
            }
            throw err;
        }
    }

    private async commitSpan(span: PendingSpan): Promise<void> {
        if (!this.doc || this.doc.complete) return;
        const questionId = this.doc.question.question_id;
        this.setBusy(true);
        try {
            await this.client.addAnnotation(this.token, questionId, span.start, span.end);
            window.getSelection()?.removeAllRanges();
            await this.refresh();
        } catch (err) {
            if (err instanceof ApiError) {
                window.getSelection()?.removeAllRanges();
                this.overlay = {
                    kind: "error",
                    title: "That selection is invalid",
                    message: err.message,
                };
            } else {
                this.overlay = {
                    kind: "retry",
                    message: "The annotation could not be saved because of a "
                        + "network problem. Your selection was kept.",
                    span,
                };
            }
        }
        this.setBusy(false);
    }

    private async removeAnnotation(annotationId: string): Promise<void> {
        this.setBusy(true);
        try {
            await this.client.removeAnnotation(this.token, annotationId);
            await this.refresh();
        } catch (err) {
            this.overlay = this.errorOverlay(err);
            await this.tryResync();
        }
        this.setBusy(false);
    }

    private async answer(inputId: string, value: AnswerValue): Promise<void> {
        if (!this.doc || this.doc.complete) return;
        const questionId = this.doc.question.question_id;
        this.setBusy(true);
        try {
            const nav = await this.client.putAnswer(this.token, questionId, inputId, value);
            if (this.doc && !this.doc.complete) {
                this.doc.answers[inputId] = value;
                this.doc.nav = nav;
            }
        } catch (err) {
            this.overlay = this.errorOverlay(err);
            await this.tryResync();
        }
        this.setBusy(false);
    }

    private async navigate(action: "prev" | "next" | "submit"): Promise<void> {
        if (!this.doc || this.doc.complete) return;
        this.setBusy(true);
        try {
            if (action === "prev") {
                this.doc = await this.client.prev(this.token);
            } else if (action === "next") {
                this.doc = await this.client.next(this.token);
            } else {
                this.doc = await this.client.submit(this.token, this.doc.section_id);
            }
            this.buffer.cancel();
        } catch (err) {
            this.overlay = this.errorOverlay(err);
            await this.tryResync();
        }
        this.setBusy(false);
    }

    private errorOverlay(err: unknown): Overlay {
        if (err instanceof ApiError) {
            return { kind: "error", title: "The server declined that", message: err.message };
        }
        return {
            kind: "error",
            title: "Network problem",
            message: "The request did not reach the server. Please try again.",
        };
    }

    private async tryResync(): Promise<void> {
        try {
            await this.refresh();
        } catch {
            // keep the stale view; the overlay already explains the failure
        }
    }

    private setBusy(busy: boolean): void {
        this.busy = busy;
        this.render();
    }

    // -- rendering --------------------------------------------------------------

    private render(): void {
        const root = this.root;
        root.textContent = "";
        if (!this.doc) {
            const p = document.createElement("p");
            p.className = "loading";
            p.textContent = "Loading…";
            root.appendChild(p);
            return;
        }
        if (this.doc.complete) {
            root.appendChild(this.completionCard());
            this.appendOverlay(root);
            return;
        }
        const doc = this.doc;

        const header = document.createElement("header");
        header.className = "progress-header";
        header.textContent = `${doc.progress.section_label} — `
            + `${doc.progress.progress_noun} ${doc.progress.index} of ${doc.progress.total}`;
        root.appendChild(header);

        const card = document.createElement("section");
        card.className = "question-card";

        const prompt = document.createElement("h2");
        prompt.className = "prompt";
        prompt.textContent = doc.question.prompt;
        card.appendChild(prompt);

        if (doc.question.instructions || doc.question.instructions_url) {
            const btn = document.createElement("button");
            btn.type = "button";
            btn.id = "btn-instructions";
            btn.className = "link-btn";
            btn.textContent = "View instructions";
            btn.addEventListener("click", () => {
                this.overlay = { kind: "instructions" };
                this.render();
            });
            card.appendChild(btn);
        }

        if (doc.question.annotation_task) {
            const wrap = document.createElement("div");
            wrap.className = "task-wrap";
            const text = document.createElement("div");
            text.id = "task-text";
            renderTaskText(
                text,
                doc.question.annotation_task.text,
                doc.annotations,
                (id) => void this.removeAnnotation(id),
            );
            wrap.appendChild(text);
            card.appendChild(wrap);
        }

        const inputs = document.createElement("div");
        inputs.id = "inputs";
        for (const inp of doc.question.inputs) {
            inputs.appendChild(renderInput(
                inp,
                doc.answers[inp.input_id],
                (inputId, value) => void this.answer(inputId, value),
            ));
        }
        card.appendChild(inputs);
        root.appendChild(card);

        const nav = document.createElement("footer");
        nav.className = "nav-bar";
        nav.appendChild(this.navButton("btn-prev", "PREVIOUS", doc.nav.can_prev, "prev"));
        nav.appendChild(this.navButton("btn-next", "NEXT", doc.nav.can_next, "next"));
        if (doc.progress.index === doc.progress.total) {
            nav.appendChild(this.navButton("btn-submit", "SUBMIT", doc.nav.can_submit, "submit"));
        }
        root.appendChild(nav);

        if (this.busy) {
            for (const ctl of card.querySelectorAll<HTMLButtonElement>("button, input, textarea")) {
                ctl.disabled = true;
            }
        }

        this.appendOverlay(root);
    }

    private navButton(
        id: string, label: string, enabled: boolean, action: "prev" | "next" | "submit",
    ): HTMLButtonElement {
        const btn = document.createElement("button");
        btn.type = "button";
        btn.id = id;
        btn.className = "nav-btn";
        btn.textContent = label;
        btn.disabled = this.busy || !enabled;
        btn.addEventListener("click", () => void this.navigate(action));
        return btn;
    }

    private completionCard(): HTMLElement {
        const card = document.createElement("section");
        card.className = "completion-card";
        const h = document.createElement("h2");
        h.textContent = "Thank you!";
        const p = document.createElement("p");
        p.textContent = "All sections are submitted. You can close this page.";
        const small = document.createElement("p");
        small.className = "token-note";
        small.textContent = `Session: ${this.token}`;
        card.appendChild(h);
        card.appendChild(p);
        card.appendChild(small);
        return card;
    }

    private appendOverlay(root: HTMLElement): void {
        if (!this.overlay) return;
        const overlay = this.overlay;
        const shroud = document.createElement("div");
        shroud.id = "overlay";
        shroud.className = "overlay";
        shroud.dataset.kind = overlay.kind;
        const box = document.createElement("div");
        box.className = "overlay-box";

        const title = document.createElement("h3");
        const message = document.createElement("p");
        if (overlay.kind === "instructions") {
            title.textContent = "Instructions";
            const q = this.doc && !this.doc.complete ? this.doc.question : null;
            message.textContent = q?.instructions ?? "";
            box.appendChild(title);
            box.appendChild(message);
            if (q?.instructions_url) {
                const a = document.createElement("a");
                a.href = q.instructions_url;
                a.target = "_blank";
                a.rel = "noopener";
                a.textContent = "Open the full coding book";
                box.appendChild(a);
            }
        } else {
            title.textContent = overlay.kind === "retry" ? "Network problem" : overlay.title;
            message.textContent = overlay.message;
            box.appendChild(title);
            box.appendChild(message);
        }

        const row = document.createElement("div");
        row.className = "overlay-actions";
        if (overlay.kind === "retry") {
            const retry = document.createElement("button");
            retry.type = "button";
            retry.id = "overlay-retry";
            retry.textContent = "Retry";
            retry.addEventListener("click", () => {
                this.overlay = null;
                void this.commitSpan(overlay.span);
            });
            row.appendChild(retry);
        }
        const dismiss = document.createElement("button");
        dismiss.type = "button";
        dismiss.id = "overlay-dismiss";
        dismiss.textContent = overlay.kind === "instructions" ? "Close" : "OK";
        dismiss.addEventListener("click", () => {
            this.overlay = null;
            this.render();
        });
        row.appendChild(dismiss);
        box.appendChild(row);
        shroud.appendChild(box);
        root.appendChild(shroud);
    }
}

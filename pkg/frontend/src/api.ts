import type {
    AnnotationCreated,
    AnswerValue,
    CurrentDoc,
    ErrorEnvelope,
    NavDoc,
} from "./types.js";

/** A non-2xx reply, carrying the server's error envelope. */
export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly code: string,
        message: string,
        readonly details: string[] = [],
    ) {
        super(message);
        this.name = "ApiError";
    }
}

async function toError(res: Response): Promise<ApiError> {
    let env: Partial<ErrorEnvelope> = {};
    try {
        env = await res.json();
    } catch {
        // non-JSON body (proxy error page etc.); fall through to defaults
    }
    return new ApiError(
        res.status,
        env.code ?? "http_error",
        env.message ?? `request failed with status ${res.status}`,
        env.details ?? [],
    );
}

/**
 * Thin client for the participant API. Mutating calls are funneled through
 * a promise chain so at most one is in flight per client; the server locks
 * per session anyway, but the UI should never race itself.
 */
export class Client {
    private chain: Promise<unknown> = Promise.resolve();

    constructor(private readonly base: string = "") {}

    async createSession(surveyId: string): Promise<string> {
        const doc = await this.send<{ session_token: string }>(
            "POST", `/api/surveys/${encodeURIComponent(surveyId)}/sessions`);
        return doc.session_token;
    }

    current(token: string): Promise<CurrentDoc> {
        return this.send<CurrentDoc>("GET", `/api/sessions/${token}/current`);
    }

    putAnswer(token: string, questionId: string, inputId: string,
              value: AnswerValue): Promise<NavDoc> {
        return this.mutate<NavDoc>(
            "PUT", `/api/sessions/${token}/answers/${questionId}/${inputId}`, value);
    }

    addAnnotation(token: string, questionId: string,
                  rawStart: number, rawEnd: number): Promise<AnnotationCreated> {
        return this.mutate<AnnotationCreated>(
            "POST", `/api/sessions/${token}/annotations/${questionId}`,
            { raw_start: rawStart, raw_end: rawEnd });
    }

    removeAnnotation(token: string, annotationId: string): Promise<void> {
        return this.mutate<void>(
            "DELETE", `/api/sessions/${token}/annotations/${annotationId}`);
    }

    next(token: string): Promise<CurrentDoc> {
        return this.mutate<CurrentDoc>("POST", `/api/sessions/${token}/next`);
    }

    prev(token: string): Promise<CurrentDoc> {
        return this.mutate<CurrentDoc>("POST", `/api/sessions/${token}/prev`);
    }

    submit(token: string, sectionId: string): Promise<CurrentDoc> {
        return this.mutate<CurrentDoc>(
            "POST", `/api/sessions/${token}/sections/${sectionId}/submit`);
    }

    private mutate<T>(method: string, path: string, body?: unknown): Promise<T> {
        const run = this.chain.then(() => this.send<T>(method, path, body));
        this.chain = run.catch(() => undefined); // a failure must not jam the queue
        return run;
    }

    private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
        const res = await fetch(this.base + path, {
            method,
            headers: body !== undefined ? { "Content-Type": "application/json" } : {},
            body: body !== undefined ? JSON.stringify(body) : undefined,
        });
        if (!res.ok) {
            throw await toError(res);
        }
        if (res.status === 204) {
            return undefined as T;
        }
        return res.json() as Promise<T>;
    }
}

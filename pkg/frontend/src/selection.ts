// Pending-selection bookkeeping for the annotate flow. A selection commits
// on either trigger: the pointer is released, or the selection has sat
// unchanged for a full second. The buffer holds at most one pending span and
// guarantees the pause timer fires at most once per distinct selection.

export interface PendingSpan {
    start: number; // unicode scalar offsets into the task text
    end: number;
}

export type CommitFn = (span: PendingSpan) => void;

export const PAUSE_COMMIT_MS = 1000;

export class SelectionBuffer {
    private pending: PendingSpan | null = null;
    private timer: ReturnType<typeof setTimeout> | null = null;

    constructor(
        private readonly commit: CommitFn,
        private readonly pauseMs: number = PAUSE_COMMIT_MS,
    ) {}

    /**
     * Track the live selection. A changed span restarts the pause clock; an
     * identical span leaves it running so duplicate selectionchange events
     * cannot postpone (or repeat) the commit. Collapsed spans cancel.
     */
    update(start: number, end: number): void {
        if (start >= end) {
            this.cancel();
            return;
        }
        if (this.pending && this.pending.start === start && this.pending.end === end) {
            return; // stationary: clock keeps ticking
        }
        this.clearTimer();
        this.pending = { start, end };
        this.timer = setTimeout(() => {
            this.timer = null;
            this.fire();
        }, this.pauseMs);
    }

    /** Pointer released: commit whatever is pending right away. */
    release(): void {
        this.fire();
    }

    cancel(): void {
        this.clearTimer();
        this.pending = null;
    }

    get current(): PendingSpan | null {
        return this.pending;
    }

    private fire(): void {
        if (!this.pending) return;
        const span = this.pending;
        this.cancel();
        this.commit(span);
    }

    private clearTimer(): void {
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
    }
}

// Renders a question's task text with its stored annotations as inline
// highlight chips, and converts live DOM selections back into the scalar
// offsets the server expects.

import { scalarSlice, utf16ToScalar } from "./offsets.js";
import type { PendingSpan } from "./selection.js";
import type { AnnotationDoc } from "./types.js";

/**
 * Rebuild `container` as text segments interleaved with highlight chips.
 * The concatenated text content of the container equals `text` exactly
 * (the remove button carries no text node), which is what keeps DOM range
 * arithmetic honest.
 */
export function renderTaskText(
    container: HTMLElement,
    text: string,
    annotations: AnnotationDoc[],
    onRemove: (annotationId: string) => void,
): void {
    container.textContent = "";
    const ordered = [...annotations].sort((a, b) => a.start - b.start);
    let at = 0; // scalar offset
    for (const ann of ordered) {
        if (ann.start > at) {
            container.appendChild(
                document.createTextNode(scalarSlice(text, at, ann.start)));
        }
        const chip = document.createElement("mark");
        chip.className = "chip";
        chip.dataset.annotationId = ann.annotation_id;
        chip.dataset.start = String(ann.start);
        chip.dataset.end = String(ann.end);
        chip.appendChild(
            document.createTextNode(scalarSlice(text, ann.start, ann.end)));
        const x = document.createElement("button");
        x.type = "button";
        x.className = "chip-remove";
        x.setAttribute("aria-label", "Remove annotation");
        x.title = "Remove annotation";
        x.addEventListener("click", (ev) => {
            ev.preventDefault();
            ev.stopPropagation();
            onRemove(ann.annotation_id);
        });
        chip.appendChild(x);
        container.appendChild(chip);
        at = ann.end;
    }
    const total = utf16ToScalar(text, text.length);
    if (at < total) {
        container.appendChild(document.createTextNode(scalarSlice(text, at, total)));
    }
}

/**
 * UTF-16 offset of a (node, offset) boundary point measured against the
 * container's text content. Returns null when the point lies outside.
 */
function pointToUtf16(container: HTMLElement, node: Node, offset: number): number | null {
    if (node !== container && !container.contains(node)) {
        return null;
    }
    const probe = document.createRange();
    probe.selectNodeContents(container);
    try {
        probe.setEnd(node, offset);
    } catch {
        return null;
    }
    return probe.toString().length;
}

/**
 * Translate a DOM range into a scalar span over the task text, or null when
 * the range does not lie inside the container.
 */
export function rangeToSpan(
    container: HTMLElement,
    text: string,
    range: Range,
): PendingSpan | null {
    const a = pointToUtf16(container, range.startContainer, range.startOffset);
    const b = pointToUtf16(container, range.endContainer, range.endOffset);
    if (a === null || b === null) return null;
    const lo = Math.min(a, b);
    const hi = Math.max(a, b);
    return { start: utf16ToScalar(text, lo), end: utf16ToScalar(text, hi) };
}

/** The live browser selection as a scalar span inside `container`, if any. */
export function selectionToSpan(container: HTMLElement, text: string): PendingSpan | null {
    const sel = window.getSelection();
    if (!sel || sel.rangeCount === 0) return null;
    return rangeToSpan(container, text, sel.getRangeAt(0));
}

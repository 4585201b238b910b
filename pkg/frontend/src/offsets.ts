// The server counts annotation offsets in Unicode scalar values. JavaScript
// strings index UTF-16 code units, so anything outside the BMP (emoji,
// rare CJK) occupies two units but one scalar. These helpers convert between
// the two spaces; both treat an index inside a surrogate pair as pointing at
// the pair's scalar.

/** Number of Unicode scalars strictly before UTF-16 index `u16` in `text`. */
export function utf16ToScalar(text: string, u16: number): number {
    if (u16 < 0 || u16 > text.length) {
        throw new RangeError(`utf16 index ${u16} outside [0, ${text.length}]`);
    }
    let scalars = 0;
    let i = 0;
    while (i < u16) {
        const cp = text.codePointAt(i);
        if (cp === undefined) break;
        const width = cp > 0xffff ? 2 : 1;
        if (i + width > u16) break; // index splits a pair: stop at its start
        i += width;
        scalars += 1;
    }
    return scalars;
}

/** UTF-16 index of the scalar at position `scalar` (or text.length at the end). */
export function scalarToUtf16(text: string, scalar: number): number {
    if (scalar < 0) {
        throw new RangeError(`scalar index ${scalar} is negative`);
    }
    let seen = 0;
    let i = 0;
    while (i < text.length) {
        if (seen === scalar) return i;
        const cp = text.codePointAt(i);
        i += cp !== undefined && cp > 0xffff ? 2 : 1;
        seen += 1;
    }
    if (seen === scalar) return text.length;
    throw new RangeError(`scalar index ${scalar} outside [0, ${seen}]`);
}

/** Length of `text` in Unicode scalars. */
export function scalarLength(text: string): number {
    return utf16ToScalar(text, text.length);
}

/** Slice `text` by scalar offsets (half-open). */
export function scalarSlice(text: string, start: number, end: number): string {
    return text.slice(scalarToUtf16(text, start), scalarToUtf16(text, end));
}

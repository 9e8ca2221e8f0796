/** Pure span-highlight geometry: split paragraph text into render segments
 * at entity boundaries. Entities may nest; the innermost entity of a segment
 * is its click target. */

import type { EntityDto } from "./types.js";

export interface HighlightSegment {
  start: number;
  end: number;
  text: string;
  /** ann_ids covering this segment, outermost (longest span) first */
  covering: string[];
}

export function computeSegments(text: string, entities: EntityDto[]): HighlightSegment[] {
  const boundaries = new Set<number>([0, text.length]);
  for (const entity of entities) {
    boundaries.add(entity.span[0]);
    boundaries.add(entity.span[1]);
  }
  const cuts = [...boundaries].filter((b) => b >= 0 && b <= text.length).sort((a, b) => a - b);
  const segments: HighlightSegment[] = [];
  for (let i = 0; i + 1 < cuts.length; i++) {
    const start = cuts[i]!;
    const end = cuts[i + 1]!;
    if (start === end) continue;
    const covering = entities
      .filter((e) => e.span[0] <= start && end <= e.span[1])
      .sort((a, b) => b.span[1] - b.span[0] - (a.span[1] - a.span[0]) || a.span[0] - b.span[0])
      .map((e) => e.ann_id);
    segments.push({ start, end, text: text.slice(start, end), covering });
  }
  return segments;
}

/** Innermost entity covering the segment, if any (the last in `covering`). */
export function innermost(segment: HighlightSegment): string | null {
  return segment.covering.length ? segment.covering[segment.covering.length - 1]! : null;
}

/** Server-trust check: every entity surface must equal the text slice at its
 * span. Returns the ann_ids that do not match (should always be empty). */
export function surfaceMismatches(text: string, entities: EntityDto[]): string[] {
  return entities
    .filter((e) => text.slice(e.span[0], e.span[1]) !== e.surface)
    .map((e) => e.ann_id);
}

/** Map a DOM selection expressed as (segment index, offset within segment)
 * endpoints back to paragraph character offsets. */
export function selectionToSpan(
  segments: HighlightSegment[],
  anchor: { segment: number; offset: number },
  focus: { segment: number; offset: number },
): [number, number] | null {
  const anchorSeg = segments[anchor.segment];
  const focusSeg = segments[focus.segment];
  if (!anchorSeg || !focusSeg) return null;
  const a = anchorSeg.start + Math.min(anchor.offset, anchorSeg.text.length);
  const b = focusSeg.start + Math.min(focus.offset, focusSeg.text.length);
  const start = Math.min(a, b);
  const end = Math.max(a, b);
  return start < end ? [start, end] : null;
}

/** Trim a selection span to its non-whitespace core (no empty result). */
export function trimSpan(text: string, span: [number, number]): [number, number] | null {
  let [start, end] = span;
  while (start < end && /\s/.test(text[start]!)) start++;
  while (end > start && /\s/.test(text[end - 1]!)) end--;
  return start < end ? [start, end] : null;
}

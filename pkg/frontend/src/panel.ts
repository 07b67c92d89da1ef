/** The side-by-side document panel: source text with the annotated
 * spans marked, ready for hover cross-highlighting.
 */

import type { View, ViewEntity } from "./schema.js";

export interface Segment {
  start: number;
  end: number;
  text: string;
  /** Entities covering this slice, outermost first (nesting allowed). */
  entityIds: string[];
}

/** Cut the text at every entity boundary; each piece knows which
 * entities cover it, so nested annotations need no nested markup. */
export function segmentText(text: string, entities: ViewEntity[]): Segment[] {
  const cuts = new Set<number>([0, text.length]);
  for (const e of entities) {
    cuts.add(e.start);
    cuts.add(e.end);
  }
  const points = [...cuts].sort((a, b) => a - b);
  const ordered = [...entities].sort((a, b) => a.start - b.start || b.end - a.end);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const [start, end] = [points[i], points[i + 1]];
    if (start >= end) continue;
    const covering = ordered.filter((e) => e.start <= start && end <= e.end).map((e) => e.id);
    segments.push({ start, end, text: text.slice(start, end), entityIds: covering });
  }
  return segments;
}

export function renderPanel(view: View): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "doc-panel";
  panel.setAttribute("data-kind", "doc-panel");
  const pre = document.createElement("pre");
  pre.className = "doc-text";
  for (const seg of segmentText(view.sourceText, view.entities)) {
    if (seg.entityIds.length === 0) {
      pre.appendChild(document.createTextNode(seg.text));
      continue;
    }
    const mark = document.createElement("span");
    mark.className = "entity-span";
    mark.setAttribute("data-entity-ids", seg.entityIds.join(" "));
    mark.setAttribute("data-start", String(seg.start));
    mark.setAttribute("data-end", String(seg.end));
    mark.textContent = seg.text;
    pre.appendChild(mark);
  }
  panel.appendChild(pre);
  return panel;
}

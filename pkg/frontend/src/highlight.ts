/** The bar ↔ source-text correspondence.
 *
 * Every bar (or table entry) stands for one entity bundle; its source
 * offsets are exactly the offsets of the bundle's entities as given in
 * the view JSON. Hovering either side lights up the other.
 */

import { bundleClosure, type View } from "./schema.js";

export interface OffsetRange {
  start: number;
  end: number;
}

export class HighlightIndex {
  /** bundle root id → entity ids in hover scope (the bundle closure). */
  readonly closures = new Map<string, string[]>();
  /** entity id → owning bundle root id (bundles partition entities). */
  readonly bundleOfEntity = new Map<string, string>();
  /** entity id → its character range in the source text. */
  readonly offsetsByEntity = new Map<string, OffsetRange>();

  constructor(view: View) {
    for (const e of view.entities) {
      this.offsetsByEntity.set(e.id, { start: e.start, end: e.end });
    }
    for (const bundle of view.timeline.bundles) {
      const ids = bundleClosure(bundle);
      this.closures.set(bundle.rootId, ids);
      for (const id of ids) this.bundleOfEntity.set(id, bundle.rootId);
    }
  }

  /** The exact source offsets a bar highlights, in document order. */
  offsetsOf(bundleRootId: string): OffsetRange[] {
    const ids = this.closures.get(bundleRootId) ?? [];
    return ids
      .map((id) => this.offsetsByEntity.get(id))
      .filter((r): r is OffsetRange => r !== undefined)
      .sort((a, b) => a.start - b.start || a.end - b.end);
  }
}

const HL_CLASS = "hl";

function entityIdsOf(node: Element | null): string[] {
  const host = node?.closest("[data-entity-ids]");
  const raw = host?.getAttribute("data-entity-ids") ?? "";
  return raw ? raw.split(" ") : [];
}

/** Wire hover cross-highlighting between the chart and the text panel.
 *
 * Both sides mark their interactive nodes with `data-entity-ids`; hover
 * resolves those ids to bundles and toggles `.hl` on every node showing
 * any entity of those bundles.
 */
export function attachHighlighting(
  chart: Element,
  panel: Element,
  index: HighlightIndex,
  onHover: (entityId: string | null) => void = () => {},
): void {
  const roots = [chart, panel];

  const setHighlight = (bundleIds: Set<string>) => {
    for (const root of roots) {
      for (const node of root.querySelectorAll("[data-entity-ids]")) {
        const hit = entityIdsOf(node).some((id) => {
          const b = index.bundleOfEntity.get(id);
          return b !== undefined && bundleIds.has(b);
        });
        node.classList.toggle(HL_CLASS, hit);
      }
    }
  };

  const enter = (event: Event) => {
    const ids = entityIdsOf(event.target as Element);
    const bundles = new Set<string>();
    for (const id of ids) {
      const b = index.bundleOfEntity.get(id);
      if (b !== undefined) bundles.add(b);
    }
    setHighlight(bundles);
    onHover(ids.length ? ids[ids.length - 1] : null);
  };
  const leave = () => {
    setHighlight(new Set());
    onHover(null);
  };

  for (const root of roots) {
    root.addEventListener("mouseover", enter);
    root.addEventListener("mouseout", leave);
  }
}

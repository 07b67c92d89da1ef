/** Build the timeline SVG DOM from a view document.
 *
 * Pure presenter: every box, lane, and label comes from the server
 * layout; the only client inputs are the zoom width and hover state.
 */

import { Geometry } from "./geometry.js";
import { bundleClosure, type Bar, type Bundle, type Row, type View } from "./schema.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const FONT = "13px system-ui, sans-serif";
const SMALL_FONT = "11px system-ui, sans-serif";
const CHAR_W = 7.2;
const SMALL_CHAR_W = 6.0;

export interface RenderResult {
  svg: SVGSVGElement;
  /** bundle root id → the interactive elements drawn for it. */
  elementsByBundle: Map<string, Element[]>;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
  text?: string,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Shorten to the pixel budget with an ellipsis; generous budgets keep the
 * full text, which is what zooming in buys you. */
export function fitLabel(text: string, budgetPx: number, charW = CHAR_W): string {
  const maxChars = Math.max(1, Math.floor(budgetPx / charW));
  if (text.length <= maxChars) return text;
  return text.slice(0, Math.max(1, maxChars - 1)) + "…";
}

export function renderView(view: View, columnWidth: number): RenderResult {
  const layout = view.layout;
  const geom = new Geometry(layout, columnWidth);
  const theme = layout.theme;
  const bundlesById = new Map<string, Bundle>(view.timeline.bundles.map((b) => [b.rootId, b]));
  const rowsById = new Map<string, Row>(layout.rows.map((r) => [r.rowId, r]));
  const elementsByBundle = new Map<string, Element[]>();
  const track = (rootId: string, node: Element) => {
    const list = elementsByBundle.get(rootId) ?? [];
    list.push(node);
    elementsByBundle.set(rootId, list);
  };
  const closureAttr = (rootId: string): string => {
    const bundle = bundlesById.get(rootId);
    return bundle ? bundleClosure(bundle).join(" ") : rootId;
  };

  const c = layout.canvas;
  const svg = el("svg", {
    xmlns: SVG_NS,
    width: geom.width,
    height: geom.height,
    viewBox: `0 0 ${geom.width} ${geom.height}`,
    role: "img",
    "data-kind": "timeline-canvas",
  });
  svg.appendChild(el("rect", { x: 0, y: 0, width: geom.width, height: geom.height, fill: "#ffffff" }));

  const bandTop = c.margin + c.headerHeight;
  const bandBottom = geom.height - c.legendHeight - c.margin;

  // Column headers and gridlines.
  for (const col of layout.columns) {
    const g = geom.column(col.orderIndex);
    const cx = g.x + g.width / 2;
    const head = el("g", {
      "data-kind": "column-header",
      "data-cluster-id": col.clusterId,
      "data-order-index": col.orderIndex,
    });
    head.appendChild(
      el("text", { x: cx, y: c.margin + 18, "text-anchor": "middle", style: `font: 600 ${FONT}` },
        fitLabel(col.label, g.width - 8)),
    );
    if (col.resolvedDate !== null) {
      head.appendChild(
        el("text", { x: cx, y: c.margin + 36, "text-anchor": "middle", fill: "#6b7280", style: `font: ${SMALL_FONT}` },
          col.resolvedDate),
      );
    }
    head.appendChild(el("line", { x1: g.x, y1: bandTop, x2: g.x, y2: bandBottom, stroke: "#e5e7eb" }));
    head.appendChild(
      el("line", { x1: g.x + g.width, y1: bandTop, x2: g.x + g.width, y2: bandBottom, stroke: "#e5e7eb" }),
    );
    svg.appendChild(head);
  }

  // Row bands and labels.
  layout.rows.forEach((row, i) => {
    const band = el("g", {
      "data-kind": "row",
      "data-row-id": row.rowId,
      "data-category": row.category,
      "data-lane-count": row.laneCount,
    });
    band.appendChild(
      el("rect", {
        x: c.margin,
        y: row.y,
        width: geom.width - 2 * c.margin,
        height: row.height,
        fill: i % 2 ? "#f9fafb" : "#ffffff",
      }),
    );
    band.appendChild(
      el("text", {
        x: c.margin + 6,
        y: row.y + row.height / 2 + 4,
        fill: theme[row.colorToken],
        style: `font: 600 ${FONT}`,
      }, fitLabel(row.label, c.labelWidth - 12)),
    );
    band.appendChild(
      el("line", { x1: c.margin, y1: row.y + row.height, x2: geom.width - c.margin, y2: row.y + row.height, stroke: "#e5e7eb" }),
    );
    svg.appendChild(band);
  });

  // Bars.
  for (const bar of layout.bars) {
    const row = rowsById.get(bar.rowId)!;
    svg.appendChild(renderBar(bar, row, geom, theme[row.colorToken], closureAttr(bar.bundleRootId), track));
  }

  // Key→value tables.
  for (const table of layout.tables) {
    const row = rowsById.get(table.rowId)!;
    const rect = geom.tableRect(table, row.y);
    const color = theme[row.colorToken];
    const g = el("g", {
      "data-kind": "table",
      "data-row-id": table.rowId,
      "data-lane": table.lane,
      "data-anchor-col": table.anchorCol,
      "data-entry-count": table.entries.length,
    });
    g.appendChild(el("rect", {
      x: rect.x, y: rect.y, width: rect.width, height: rect.height,
      fill: "#ffffff", stroke: color, "stroke-width": 2,
    }));
    const rowH = rect.height / table.entries.length;
    const mid = rect.x + rect.width * 0.5;
    g.appendChild(el("line", { x1: mid, y1: rect.y, x2: mid, y2: rect.y + rect.height, stroke: color }));
    table.entries.forEach((entry, i) => {
      const y = rect.y + i * rowH;
      if (i > 0) g.appendChild(el("line", { x1: rect.x, y1: y, x2: rect.x + rect.width, y2: y, stroke: color }));
      const entryEl = el("g", {
        "data-kind": "table-entry",
        "data-bundle-root": entry.bundleRootId,
        "data-entity-ids": closureAttr(entry.bundleRootId),
      });
      entryEl.appendChild(el("rect", {
        x: rect.x, y, width: rect.width, height: rowH, fill: "transparent", "pointer-events": "all",
      }));
      entryEl.appendChild(el("text", {
        x: rect.x + 5, y: y + rowH / 2 + 4, style: `font: ${SMALL_FONT}`,
      }, fitLabel(entry.key, rect.width / 2 - 10, SMALL_CHAR_W)));
      entryEl.appendChild(el("text", {
        x: mid + 5, y: y + rowH / 2 + 4, style: `font: ${SMALL_FONT}`,
      }, fitLabel(entry.value, rect.width / 2 - 10, SMALL_CHAR_W)));
      g.appendChild(entryEl);
      track(entry.bundleRootId, entryEl);
    });
    svg.appendChild(g);
  }

  // Legend: one swatch per category actually present, in row order.
  const seen = new Set<string>();
  const legend = el("g", { "data-kind": "legend" });
  let lx = c.margin + 4;
  const ly = geom.height - c.margin - c.legendHeight + 14;
  for (const row of layout.rows) {
    if (seen.has(row.category)) continue;
    seen.add(row.category);
    legend.appendChild(el("rect", { x: lx, y: ly, width: 12, height: 12, fill: theme[row.colorToken], rx: 2 }));
    legend.appendChild(el("text", { x: lx + 16, y: ly + 10, style: `font: ${SMALL_FONT}` }, row.category));
    lx += 16 + row.category.length * SMALL_CHAR_W + 18;
  }
  if (seen.size) svg.appendChild(legend);

  return { svg, elementsByBundle };
}

function renderBar(
  bar: Bar,
  row: Row,
  geom: Geometry,
  color: string,
  entityIds: string,
  track: (rootId: string, node: Element) => void,
): SVGGElement {
  const { x1, x2 } = geom.barEdges(bar);
  const y = geom.barY(row.y, bar.lane);
  const h = geom.barHeight();
  const flags = new Set(bar.styleFlags);

  const g = el("g", {
    "data-kind": "bar",
    "data-bundle-root": bar.bundleRootId,
    "data-row-id": bar.rowId,
    "data-lane": bar.lane,
    "data-start-col": bar.startCol,
    "data-end-col": bar.endCol,
    "data-entity-ids": entityIds,
  });
  track(bar.bundleRootId, g);

  let fill = color;
  if (flags.has("hollow")) fill = "#ffffff";
  else if (flags.has("gray")) fill = "#9ca3af";
  const rectAttrs: Record<string, string | number> = {
    x: x1, y, width: Math.max(2, x2 - x1), height: h, rx: 4, fill,
  };
  if (flags.has("hollow") || flags.has("dashed") || flags.has("outline")) {
    rectAttrs["stroke"] = flags.has("gray") ? "#6b7280" : color;
    rectAttrs["stroke-width"] = 2;
  }
  if (flags.has("dashed")) rectAttrs["stroke-dasharray"] = "6 3";
  if (flags.has("outline")) rectAttrs["fill-opacity"] = "0.25";
  g.appendChild(el("rect", rectAttrs));

  const arrow = geom.barHeight() / 2;
  if (bar.openEnd) {
    g.appendChild(el("polygon", {
      points: `${x2},${y} ${x2 + arrow},${y + h / 2} ${x2},${y + h}`,
      fill: flags.has("hollow") ? "#ffffff" : fill,
      stroke: flags.has("hollow") ? color : "none",
      "data-open": "end",
    }));
  }
  if (bar.openStart) {
    g.appendChild(el("polygon", {
      points: `${x1},${y} ${x1 - arrow},${y + h / 2} ${x1},${y + h}`,
      fill: flags.has("hollow") ? "#ffffff" : fill,
      stroke: flags.has("hollow") ? color : "none",
      "data-open": "start",
    }));
  }

  const dark = flags.has("hollow") || flags.has("outline") || flags.has("gray");
  const label = el("text", {
    x: (x1 + x2) / 2,
    y: y + h / 2 + 4,
    "text-anchor": "middle",
    fill: dark ? "#111827" : "#ffffff",
    style: `font: ${FONT}`,
  }, fitLabel(bar.label, x2 - x1 - 8));
  if (flags.has("strikethrough")) label.setAttribute("text-decoration", "line-through");
  g.appendChild(label);

  if (flags.has("cancelled")) {
    const icon = el("g", { "data-kind": "cancelled-icon" });
    const cx = x1 - 4;
    icon.appendChild(el("line", { x1: cx - 5, y1: y + h / 2 - 5, x2: cx + 5, y2: y + h / 2 + 5, stroke: "#b91c1c", "stroke-width": 2.5 }));
    icon.appendChild(el("line", { x1: cx - 5, y1: y + h / 2 + 5, x2: cx + 5, y2: y + h / 2 - 5, stroke: "#b91c1c", "stroke-width": 2.5 }));
    g.appendChild(icon);
  }

  if (bar.supplementalLabels.length) {
    const budget = geom.layout.canvas.supplementalBudget * Math.max(1, geom.factor);
    g.appendChild(el("text", {
      x: x2 + arrow + 6,
      y: y + h / 2 + 4,
      fill: "#374151",
      style: `font: ${SMALL_FONT}`,
    }, fitLabel(bar.supplementalLabels.join(" · "), budget, SMALL_CHAR_W)));
  }
  return g;
}

export function svgMarkup(svg: SVGSVGElement): string {
  return new XMLSerializer().serializeToString(svg);
}

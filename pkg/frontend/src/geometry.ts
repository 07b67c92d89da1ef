/** Client-side geometry derived from the server layout plus the zoom level.
 *
 * The server computes column/row placement once (including proportional
 * spacing); zooming only rescales the horizontal axis, so bar→column
 * assignments never change client-side.
 */

import type { Bar, KeyValueTable, Layout } from "./schema.js";

export interface ColumnGeom {
  x: number;
  width: number;
}

export class Geometry {
  readonly factor: number;
  readonly gridLeft: number;
  readonly width: number;
  readonly height: number;
  private readonly colByIndex = new Map<number, ColumnGeom>();

  constructor(readonly layout: Layout, readonly columnWidth: number) {
    const c = layout.canvas;
    this.factor = columnWidth / c.columnWidth;
    this.gridLeft = c.margin + c.labelWidth;
    for (const col of layout.columns) {
      this.colByIndex.set(col.orderIndex, {
        x: this.gridLeft + (col.x - this.gridLeft) * this.factor,
        width: col.width * this.factor,
      });
    }
    let right = this.gridLeft;
    for (const geom of this.colByIndex.values()) {
      right = Math.max(right, geom.x + geom.width);
    }
    this.width = Math.round(right + c.margin);
    this.height = c.height;
  }

  column(orderIndex: number): ColumnGeom {
    const geom = this.colByIndex.get(orderIndex);
    if (!geom) throw new Error(`no column at order index ${orderIndex}`);
    return geom;
  }

  /** Left/right pixel edges of a bar spanning startCol..endCol inclusive. */
  barEdges(bar: Bar): { x1: number; x2: number } {
    const inset = 6 * Math.min(1, this.factor);
    const begin = this.column(bar.startCol);
    const end = this.column(bar.endCol);
    return { x1: begin.x + inset, x2: end.x + end.width - inset };
  }

  barY(rowY: number, lane: number): number {
    const c = this.layout.canvas;
    return rowY + c.rowPadding / 2 + lane * c.laneHeight + 4;
  }

  barHeight(): number {
    return this.layout.canvas.laneHeight - 8;
  }

  tableRect(table: KeyValueTable, rowY: number): { x: number; y: number; width: number; height: number } {
    const col = this.column(table.anchorCol);
    const inset = 6 * Math.min(1, this.factor);
    return {
      x: col.x + inset,
      y: this.barY(rowY, table.lane),
      width: col.width - 2 * inset,
      height: table.entries.length * this.layout.canvas.laneHeight - 8,
    };
  }
}

/** PNG export must work for any loaded view — including an empty one —
 * and the produced image's pixel size must match the on-screen render.
 */

import { describe, expect, it } from "vitest";

import { exportPng, type Rasterizer } from "../src/export.js";
import { renderView } from "../src/render.js";
import { EMPTY, FULL, loadView } from "./fixtures.js";
import { decodePngSize, encodePng } from "./png.js";

const testRasterizer: Rasterizer = (markup, width, height) => {
  expect(markup).toContain("<svg");
  return Promise.resolve(new Blob([encodePng(width, height) as BlobPart], { type: "image/png" }));
};

async function pngSizeOf(blob: Blob): Promise<{ width: number; height: number }> {
  return decodePngSize(new Uint8Array(await blob.arrayBuffer()));
}

describe("PNG export", () => {
  it("exports the full fixture at the rendered pixel size", async () => {
    const view = loadView(FULL);
    const { svg } = renderView(view, view.layout.canvas.columnWidth);
    const blob = await exportPng(svg, testRasterizer);
    expect(blob.type).toBe("image/png");
    expect(await pngSizeOf(blob)).toEqual({
      width: Number(svg.getAttribute("width")),
      height: Number(svg.getAttribute("height")),
    });
  });

  it("exports an empty view as a small but valid PNG", async () => {
    const view = loadView(EMPTY);
    const { svg } = renderView(view, 150);
    const blob = await exportPng(svg, testRasterizer);
    const size = await pngSizeOf(blob);
    expect(size.width).toBeGreaterThan(0);
    expect(size.height).toBeGreaterThan(0);
  });

  it("export size follows the zoom level", async () => {
    const view = loadView(FULL);
    const narrow = renderView(view, 80).svg;
    const wide = renderView(view, 300).svg;
    const narrowPng = await pngSizeOf(await exportPng(narrow, testRasterizer));
    const widePng = await pngSizeOf(await exportPng(wide, testRasterizer));
    expect(widePng.width).toBeGreaterThan(narrowPng.width);
    expect(widePng.height).toBe(narrowPng.height);
  });

  it("refuses an element with no usable size", async () => {
    const orphan = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    await expect(exportPng(orphan, testRasterizer)).rejects.toThrow(/pixel size/);
  });

  it("round-trips dimensions through the test codec", async () => {
    expect(decodePngSize(encodePng(1, 1))).toEqual({ width: 1, height: 1 });
    expect(decodePngSize(encodePng(828, 340))).toEqual({ width: 828, height: 340 });
    expect(() => decodePngSize(new Uint8Array([1, 2, 3]))).toThrow(/signature/);
  });
});

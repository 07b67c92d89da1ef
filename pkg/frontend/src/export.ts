/** PNG export of the current client render.
 *
 * Rasterizes what the user is looking at (the client SVG), not the
 * server's drawing. The rasterizer is injectable so tests can run where
 * no canvas implementation exists.
 */

import { svgMarkup } from "./render.js";

export type Rasterizer = (markup: string, width: number, height: number) => Promise<Blob>;

/** Draw the SVG onto a canvas via an Image — the browser path. */
export const browserRasterizer: Rasterizer = (markup, width, height) =>
  new Promise((resolve, reject) => {
    const image = new Image(width, height);
    const url = URL.createObjectURL(new Blob([markup], { type: "image/svg+xml" }));
    image.onload = () => {
      URL.revokeObjectURL(url);
      const canvas = document.createElement("canvas");
      canvas.width = width;
      canvas.height = height;
      const ctx = canvas.getContext("2d");
      if (!ctx) {
        reject(new Error("2d canvas unavailable"));
        return;
      }
      ctx.drawImage(image, 0, 0, width, height);
      canvas.toBlob(
        (blob) => (blob ? resolve(blob) : reject(new Error("PNG encoding failed"))),
        "image/png",
      );
    };
    image.onerror = () => {
      URL.revokeObjectURL(url);
      reject(new Error("could not load SVG for export"));
    };
    image.src = url;
  });

/** Rasterize the rendered chart at its current pixel size. */
export async function exportPng(
  svg: SVGSVGElement,
  rasterizer: Rasterizer = browserRasterizer,
): Promise<Blob> {
  const width = Number(svg.getAttribute("width"));
  const height = Number(svg.getAttribute("height"));
  if (!Number.isFinite(width) || !Number.isFinite(height) || width <= 0 || height <= 0) {
    throw new Error(`render has no usable pixel size (${width}×${height})`);
  }
  return rasterizer(svgMarkup(svg), width, height);
}

export function downloadBlob(blob: Blob, filename: string): void {
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = filename;
  document.body.appendChild(link);
  link.click();
  link.remove();
  URL.revokeObjectURL(link.href);
}

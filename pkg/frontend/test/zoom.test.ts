/** Zoom changes geometry only: column assignments, element counts, and
 * DOM structure are invariant; labels gain room as the columns widen.
 */

import { describe, expect, it } from "vitest";

import { mountApp, ZOOM_MAX, ZOOM_MIN } from "../src/app.js";
import { fitLabel, renderView, svgMarkup } from "../src/render.js";
import { FULL, fixtureNames, loadRaw, loadView } from "./fixtures.js";

function assignments(svg: SVGSVGElement): string[] {
  return [...svg.querySelectorAll('[data-kind="bar"]')].map(
    (b) =>
      `${b.getAttribute("data-bundle-root")}:${b.getAttribute("data-start-col")}-${b.getAttribute("data-end-col")}@${b.getAttribute("data-lane")}`,
  );
}

describe("zoom", () => {
  it("keeps bar column assignments unchanged at any width", () => {
    for (const name of fixtureNames) {
      const view = loadView(name);
      const narrow = renderView(view, ZOOM_MIN).svg;
      const wide = renderView(view, ZOOM_MAX).svg;
      expect(assignments(wide)).toEqual(assignments(narrow));
      expect(Number(wide.getAttribute("width"))).toBeGreaterThanOrEqual(
        Number(narrow.getAttribute("width")),
      );
    }
  });

  it("shows full labels once the budget allows", () => {
    const view = loadView(FULL);
    const wide = renderView(view, ZOOM_MAX).svg;
    for (const bar of view.layout.bars) {
      const text = wide.querySelector(
        `[data-kind="bar"][data-bundle-root="${bar.bundleRootId}"] text`,
      )!;
      expect(text.textContent).toBe(bar.label);
    }
  });

  it("truncates with an ellipsis when space runs out", () => {
    expect(fitLabel("hypertension", 30)).toMatch(/…$/);
    expect(fitLabel("hypertension", 300)).toBe("hypertension");
    const view = loadView(FULL);
    const narrow = renderView(view, ZOOM_MIN).svg;
    const texts = [...narrow.querySelectorAll('[data-kind="bar"] text')].map(
      (t) => t.textContent ?? "",
    );
    expect(texts.some((t) => t.endsWith("…"))).toBe(true);
  });

  it("zoom then unzoom restores the identical DOM", () => {
    const app = mountApp(document.createElement("div"));
    app.loadView(loadRaw(FULL));
    const before = svgMarkup(app.root.querySelector("svg")!);
    app.setZoom(ZOOM_MAX);
    expect(svgMarkup(app.root.querySelector("svg")!)).not.toBe(before);
    app.setZoom(150);
    expect(svgMarkup(app.root.querySelector("svg")!)).toBe(before);
  });

  it("clamps the slider to its bounds", () => {
    const app = mountApp(document.createElement("div"));
    app.loadView(loadRaw(FULL));
    app.setZoom(7);
    expect(app.state.columnWidth).toBe(ZOOM_MIN);
    app.setZoom(100_000);
    expect(app.state.columnWidth).toBe(ZOOM_MAX);
  });
});

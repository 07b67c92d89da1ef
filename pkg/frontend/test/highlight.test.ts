/** Cross-highlighting: bars ↔ source offsets must be a bijection, and
 * hover must light up exactly the corresponding elements on both sides.
 */

import { describe, expect, it } from "vitest";

import { attachHighlighting, HighlightIndex } from "../src/highlight.js";
import { renderPanel, segmentText } from "../src/panel.js";
import { renderView } from "../src/render.js";
import { bundleClosure } from "../src/schema.js";
import { FULL, fixtureNames, loadView } from "./fixtures.js";

describe("highlight index", () => {
  for (const name of fixtureNames) {
    it(`maps every bar to its exact source offsets in ${name}`, () => {
      const view = loadView(name);
      const index = new HighlightIndex(view);
      const entityById = new Map(view.entities.map((e) => [e.id, e]));

      for (const bundle of view.timeline.bundles) {
        const ids = bundleClosure(bundle);
        // forward: the bar's offsets are precisely its entities' offsets
        const want = ids
          .map((id) => ({ start: entityById.get(id)!.start, end: entityById.get(id)!.end }))
          .sort((a, b) => a.start - b.start || a.end - b.end);
        expect(index.offsetsOf(bundle.rootId)).toEqual(want);
        // reverse: each of those entities belongs to this bundle only
        for (const id of ids) {
          expect(index.bundleOfEntity.get(id), `${name}:${id}`).toBe(bundle.rootId);
        }
      }

      // totality: ids not in any bundle (e.g. time expressions) map nowhere
      const inBundles = new Set(view.timeline.bundles.flatMap((b) => bundleClosure(b)));
      for (const e of view.entities) {
        if (!inBundles.has(e.id)) expect(index.bundleOfEntity.has(e.id)).toBe(false);
      }
    });
  }

  it("is a bijection between chart elements and bundles", () => {
    for (const name of fixtureNames) {
      const view = loadView(name);
      const { svg, elementsByBundle } = renderView(view, 150);
      // each bundle got exactly one interactive element
      expect([...elementsByBundle.keys()].sort()).toEqual(
        view.timeline.bundles.map((b) => b.rootId).sort(),
      );
      for (const [root, elements] of elementsByBundle) {
        expect(elements.length, `${name}:${root}`).toBe(1);
      }
      // and no interactive element exists without a bundle
      const interactive = svg.querySelectorAll('[data-kind="bar"], [data-kind="table-entry"]');
      expect(interactive.length).toBe(view.timeline.bundles.length);
    }
  });
});

describe("document panel segmentation", () => {
  it("partitions the text and tracks nesting", () => {
    const view = loadView(FULL);
    const segments = segmentText(view.sourceText, view.entities);
    expect(segments.map((s) => s.text).join("")).toBe(view.sourceText);
    for (const e of view.entities) {
      const covered = segments.filter((s) => s.entityIds.includes(e.id));
      const text = covered.map((s) => s.text).join("");
      expect(text, e.id).toBe(e.surface);
    }
  });

  it("marks nested entities on the same slice", () => {
    const view = loadView(FULL); // a1 "left lung" nests d2 via the bundle, spans overlap in text
    const panel = renderPanel(view);
    const spans = panel.querySelectorAll(".entity-span");
    expect(spans.length).toBeGreaterThan(0);
    for (const e of view.entities) {
      const hit = [...spans].filter((s) =>
        (s.getAttribute("data-entity-ids") ?? "").split(" ").includes(e.id),
      );
      expect(hit.length, e.id).toBeGreaterThan(0);
    }
  });
});

describe("hover behaviour", () => {
  function setUp(name: string) {
    const view = loadView(name);
    const { svg } = renderView(view, 150);
    const panel = renderPanel(view);
    document.body.replaceChildren(svg, panel);
    const hovered: (string | null)[] = [];
    attachHighlighting(svg, panel, new HighlightIndex(view), (id) => hovered.push(id));
    return { view, svg, panel, hovered };
  }

  function over(el: Element) {
    el.dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
  }

  it("hovering a bar highlights exactly its source spans", () => {
    const { view, svg, panel } = setUp(FULL);
    const bar = svg.querySelector('[data-kind="bar"][data-bundle-root="a1"]')!;
    over(bar);

    const barIds = new Set(bar.getAttribute("data-entity-ids")!.split(" "));
    for (const span of panel.querySelectorAll(".entity-span")) {
      const ids = span.getAttribute("data-entity-ids")!.split(" ");
      const shouldGlow = ids.some((id) => barIds.has(id));
      expect(span.classList.contains("hl")).toBe(shouldGlow);
    }
    // the bundle in the chart glows too, others don't
    expect(bar.classList.contains("hl")).toBe(true);
    const other = svg.querySelector('[data-kind="bar"][data-bundle-root="d1"]')!;
    expect(other.classList.contains("hl")).toBe(false);
    expect(view.timeline.bundles.some((b) => b.rootId === "a1")).toBe(true);
  });

  it("hovering a text span highlights its bar, and leaving clears", () => {
    const { svg, panel, hovered } = setUp(FULL);
    const feverSpan = [...panel.querySelectorAll(".entity-span")].find((s) =>
      s.getAttribute("data-entity-ids")!.split(" ").includes("d1"),
    )!;
    over(feverSpan);
    const feverBar = svg.querySelector('[data-kind="bar"][data-bundle-root="d1"]')!;
    expect(feverBar.classList.contains("hl")).toBe(true);
    expect(hovered.at(-1)).toBe("d1");

    feverSpan.dispatchEvent(new MouseEvent("mouseout", { bubbles: true }));
    expect(feverBar.classList.contains("hl")).toBe(false);
    expect(hovered.at(-1)).toBeNull();
  });

  it("hovering plain text highlights nothing", () => {
    const { svg, panel } = setUp(FULL);
    over(panel.querySelector(".doc-text")!);
    expect(svg.querySelectorAll(".hl").length).toBe(0);
    expect(panel.querySelectorAll(".hl").length).toBe(0);
  });

  it("hovering a nested bundle highlights all contained spans", () => {
    const { svg, panel } = setUp("doc02_radiology_nodule.view.json");
    const nest = svg.querySelector('[data-kind="bar"][data-bundle-root="a1"]')!;
    over(nest);
    const ids = nest.getAttribute("data-entity-ids")!.split(" ");
    expect(ids.length).toBeGreaterThan(3); // root + d1 + d2 + d3 + features + change
    for (const id of ids) {
      const lit = [...panel.querySelectorAll(".entity-span.hl")].some((s) =>
        s.getAttribute("data-entity-ids")!.split(" ").includes(id),
      );
      expect(lit, id).toBe(true);
    }
  });
});

/** Application shell: toolbar, chart, document panel, input dialog.
 *
 * All state lives in one ViewState; every mutation re-renders from the
 * loaded view document, so the DOM is a pure function of (view, state).
 */

import { postTimeline } from "./api.js";
import { downloadBlob, exportPng, type Rasterizer } from "./export.js";
import { attachHighlighting, HighlightIndex } from "./highlight.js";
import { renderPanel } from "./panel.js";
import { renderView } from "./render.js";
import { SchemaError, validateView, type Diagnostic, type View } from "./schema.js";

export const ZOOM_MIN = 60;
export const ZOOM_MAX = 400;

export interface ViewState {
  columnWidth: number;
  docPanelVisible: boolean;
  hoveredEntityId: string | null;
  loadedView: View | null;
}

export interface AppOptions {
  fetchImpl?: typeof fetch;
  rasterizer?: Rasterizer;
  download?: (blob: Blob, filename: string) => void;
}

function clampZoom(width: number): number {
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, width));
}

function button(label: string, role: string): HTMLButtonElement {
  const b = document.createElement("button");
  b.type = "button";
  b.textContent = label;
  b.setAttribute("data-role", role);
  return b;
}

export class App {
  readonly state: ViewState = {
    columnWidth: 150,
    docPanelVisible: false,
    hoveredEntityId: null,
    loadedView: null,
  };

  private readonly chartHost: HTMLElement;
  private readonly panelHost: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly zoomSlider: HTMLInputElement;
  private readonly dialog: HTMLElement;
  private readonly xmlInput: HTMLTextAreaElement;
  private readonly diagList: HTMLElement;
  private requestSeq = 0;

  constructor(readonly root: HTMLElement, private readonly options: AppOptions = {}) {
    root.classList.add("heart-app");

    const toolbar = document.createElement("header");
    toolbar.className = "toolbar";
    const title = document.createElement("strong");
    title.textContent = "Clinical timeline viewer";
    toolbar.appendChild(title);

    const zoomLabel = document.createElement("label");
    zoomLabel.textContent = "Zoom ";
    this.zoomSlider = document.createElement("input");
    this.zoomSlider.type = "range";
    this.zoomSlider.min = String(ZOOM_MIN);
    this.zoomSlider.max = String(ZOOM_MAX);
    this.zoomSlider.step = "10";
    this.zoomSlider.value = String(this.state.columnWidth);
    this.zoomSlider.setAttribute("data-role", "zoom");
    this.zoomSlider.addEventListener("input", () => this.setZoom(Number(this.zoomSlider.value)));
    zoomLabel.appendChild(this.zoomSlider);
    toolbar.appendChild(zoomLabel);

    const inputBtn = button("INPUT", "input-btn");
    inputBtn.addEventListener("click", () => this.openDialog());
    toolbar.appendChild(inputBtn);

    const saveBtn = button("SAVE", "save-btn");
    saveBtn.addEventListener("click", () =>
      this.exportCurrentPng().catch((err) => this.showBanner(String(err), "error")));
    toolbar.appendChild(saveBtn);

    const panelBtn = button("DOCUMENT", "panel-btn");
    panelBtn.addEventListener("click", () => this.toggleDocPanel());
    toolbar.appendChild(panelBtn);
    root.appendChild(toolbar);

    this.banner = document.createElement("div");
    this.banner.className = "banner";
    this.banner.setAttribute("data-role", "banner");
    this.banner.hidden = true;
    root.appendChild(this.banner);

    const content = document.createElement("main");
    content.className = "content";
    this.chartHost = document.createElement("section");
    this.chartHost.className = "chart";
    this.chartHost.setAttribute("data-role", "chart");
    content.appendChild(this.chartHost);
    this.panelHost = document.createElement("aside");
    this.panelHost.className = "panel-host";
    this.panelHost.setAttribute("data-role", "panel");
    this.panelHost.hidden = true;
    content.appendChild(this.panelHost);
    root.appendChild(content);

    this.dialog = document.createElement("div");
    this.dialog.className = "modal";
    this.dialog.setAttribute("data-role", "input-dialog");
    this.dialog.hidden = true;
    const box = document.createElement("div");
    box.className = "modal-box";
    const heading = document.createElement("h2");
    heading.textContent = "Paste an annotated document";
    box.appendChild(heading);
    this.xmlInput = document.createElement("textarea");
    this.xmlInput.setAttribute("data-role", "xml-input");
    this.xmlInput.rows = 12;
    box.appendChild(this.xmlInput);
    this.diagList = document.createElement("ul");
    this.diagList.className = "diag-list";
    this.diagList.setAttribute("data-role", "diag-list");
    box.appendChild(this.diagList);
    const submit = button("Build timeline", "submit-input");
    submit.addEventListener("click", () => {
      void this.submitInput(this.xmlInput.value);
    });
    box.appendChild(submit);
    const close = button("Close", "close-dialog");
    close.addEventListener("click", () => this.closeDialog());
    box.appendChild(close);
    this.dialog.appendChild(box);
    root.appendChild(this.dialog);
  }

  /** Validate and show a view document; on schema mismatch, banner only. */
  loadView(payload: unknown): void {
    let view: View;
    try {
      view = validateView(payload);
    } catch (err) {
      if (err instanceof SchemaError) {
        this.showBanner(`Cannot display this payload: ${err.problems[0]}`, "error");
        return;
      }
      throw err;
    }
    this.state.loadedView = view;
    this.state.columnWidth = clampZoom(view.layout.canvas.columnWidth);
    this.zoomSlider.value = String(this.state.columnWidth);
    this.hideBanner();
    const warnings = [...view.timeline.diagnostics, ...view.layout.diagnostics];
    if (warnings.length) {
      this.showBanner(
        `${warnings.length} warning${warnings.length > 1 ? "s" : ""}: ${warnings[0].message}`,
        "warn",
      );
    }
    this.renderCurrent();
  }

  setZoom(width: number): void {
    this.state.columnWidth = clampZoom(width);
    this.zoomSlider.value = String(this.state.columnWidth);
    this.renderCurrent();
  }

  toggleDocPanel(): void {
    this.state.docPanelVisible = !this.state.docPanelVisible;
    this.panelHost.hidden = !this.state.docPanelVisible;
  }

  /** POST the dialog's XML; load the response or list its diagnostics. */
  async submitInput(xml: string): Promise<void> {
    const seq = ++this.requestSeq;
    let result;
    try {
      result = await postTimeline(xml, { fetchImpl: this.options.fetchImpl });
    } catch (err) {
      if (seq === this.requestSeq) this.renderDiagnostics([
        { severity: "error", code: "request-failed", message: String(err), location: null },
      ]);
      return;
    }
    if (seq !== this.requestSeq) return; // a newer request superseded this one
    if (!result.ok) {
      this.renderDiagnostics(result.diagnostics);
      return; // prior view stays on screen
    }
    this.renderDiagnostics([]);
    this.closeDialog();
    this.loadView(result.view);
  }

  async exportCurrentPng(): Promise<Blob> {
    const svg = this.chartHost.querySelector("svg");
    if (!svg) throw new Error("nothing to export yet");
    const blob = await exportPng(svg, this.options.rasterizer);
    const name = `${this.state.loadedView?.timeline.docId || "timeline"}.png`;
    (this.options.download ?? downloadBlob)(blob, name);
    return blob;
  }

  openDialog(): void {
    this.dialog.hidden = false;
  }

  closeDialog(): void {
    this.dialog.hidden = true;
  }

  private renderCurrent(): void {
    const view = this.state.loadedView;
    if (!view) return;
    const { svg } = renderView(view, this.state.columnWidth);
    this.chartHost.replaceChildren(svg);
    this.panelHost.replaceChildren(renderPanel(view));
    attachHighlighting(svg, this.panelHost, new HighlightIndex(view), (id) => {
      this.state.hoveredEntityId = id;
    });
  }

  private renderDiagnostics(diagnostics: Diagnostic[]): void {
    this.diagList.replaceChildren(
      ...diagnostics.map((d) => {
        const li = document.createElement("li");
        li.className = `diag diag-${d.severity}`;
        li.textContent = `${d.severity} [${d.code}] ${d.message}`;
        return li;
      }),
    );
  }

  private showBanner(message: string, tone: "error" | "warn"): void {
    this.banner.textContent = message;
    this.banner.className = `banner banner-${tone}`;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
  }
}

export function mountApp(container: HTMLElement, options: AppOptions = {}): App {
  return new App(container, options);
}

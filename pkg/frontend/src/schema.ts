/** Types and a structural validator for `heart-view/1` documents.
 *
 * The view JSON is the sole contract with the server: the viewer renders
 * exclusively from it and never re-derives timeline or layout decisions.
 * The validator checks everything the renderer relies on, so a schema
 * mismatch becomes one error banner instead of a half-drawn chart.
 */

export type EntityKind =
  | "disease"
  | "anatomical"
  | "feature"
  | "change"
  | "timex3"
  | "testKey"
  | "testVal"
  | "medKey"
  | "medVal"
  | "remedy"
  | "clinicalContext";

export type RowCategory =
  | "anatomicalGroup"
  | "diseases"
  | "test"
  | "medicine"
  | "clinicalTreatment";

export type ColorToken = "orange" | "pink" | "violet" | "green" | "lightgreen";

export type StyleFlag =
  | "hollow"
  | "strikethrough"
  | "dashed"
  | "gray"
  | "cancelled"
  | "outline";

export interface ViewEntity {
  id: string;
  kind: EntityKind;
  start: number;
  end: number;
  surface: string;
  certainty: string | null;
  timexType: string | null;
  state: string | null;
}

export interface Cluster {
  clusterId: string;
  anchorTimexId: string;
  anchorLabel: string;
  resolvedDate: string | null;
  orderIndex: number;
  members: string[];
}

export interface ChangeNote {
  changeId: string;
  refId: string | null;
  surface: string;
  refSurface: string | null;
}

export interface Bundle {
  rootId: string;
  rootKind: EntityKind;
  rootQualifier: string | null;
  rootSurface: string;
  rootStart: number;
  containedIds: string[];
  containedDepths: number[];
  features: string[];
  changes: ChangeNote[];
  keyValue: string | null;
  durationTimexId: string | null;
}

export interface Span {
  bundleRootId: string;
  beginCluster: number;
  endCluster: number;
  openStart: boolean;
  openEnd: boolean;
}

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  message: string;
  location: number | null;
}

export interface TimelineDoc {
  schema: string;
  docId: string;
  dct: string;
  clusters: Cluster[];
  bundles: Bundle[];
  spans: Span[];
  diagnostics: Diagnostic[];
}

export interface Column {
  clusterId: string;
  orderIndex: number;
  label: string;
  resolvedDate: string | null;
  x: number;
  width: number;
}

export interface Row {
  rowId: string;
  category: RowCategory;
  colorToken: ColorToken;
  label: string;
  laneCount: number;
  y: number;
  height: number;
}

export interface Bar {
  bundleRootId: string;
  rowId: string;
  lane: number;
  startCol: number;
  endCol: number;
  openStart: boolean;
  openEnd: boolean;
  label: string;
  supplementalLabels: string[];
  styleFlags: StyleFlag[];
}

export interface TableEntry {
  bundleRootId: string;
  key: string;
  value: string;
}

export interface KeyValueTable {
  tableId: string;
  rowId: string;
  lane: number;
  anchorCol: number;
  entries: TableEntry[];
}

export interface Canvas {
  width: number;
  height: number;
  columnWidth: number;
  laneHeight: number;
  rowPadding: number;
  labelWidth: number;
  headerHeight: number;
  legendHeight: number;
  margin: number;
  supplementalBudget: number;
  spacing: "ordinal" | "proportional";
  spacingEffective: "ordinal" | "proportional";
}

export interface Layout {
  columns: Column[];
  rows: Row[];
  bars: Bar[];
  tables: KeyValueTable[];
  canvas: Canvas;
  theme: Record<ColorToken, string>;
  diagnostics: Diagnostic[];
}

export interface View {
  schema: "heart-view/1";
  timeline: TimelineDoc;
  layout: Layout;
  sourceText: string;
  entities: ViewEntity[];
}

export const VIEW_SCHEMA = "heart-view/1";

/** Raised when a payload is not a usable `heart-view/1` document. */
export class SchemaError extends Error {
  constructor(public readonly problems: string[]) {
    super(problems[0] ?? "invalid view document");
    this.name = "SchemaError";
  }
}

type Obj = Record<string, unknown>;

function isObj(v: unknown): v is Obj {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

class Checker {
  problems: string[] = [];

  fail(path: string, want: string, got: unknown): void {
    if (this.problems.length < 20) {
      this.problems.push(`${path}: expected ${want}, got ${describe(got)}`);
    }
  }

  str(o: Obj, path: string, key: string): void {
    if (typeof o[key] !== "string") this.fail(`${path}.${key}`, "string", o[key]);
  }

  strOrNull(o: Obj, path: string, key: string): void {
    const v = o[key];
    if (v !== null && typeof v !== "string") this.fail(`${path}.${key}`, "string|null", v);
  }

  num(o: Obj, path: string, key: string): void {
    if (typeof o[key] !== "number" || !Number.isFinite(o[key] as number)) {
      this.fail(`${path}.${key}`, "number", o[key]);
    }
  }

  bool(o: Obj, path: string, key: string): void {
    if (typeof o[key] !== "boolean") this.fail(`${path}.${key}`, "boolean", o[key]);
  }

  arr(o: Obj, path: string, key: string): unknown[] {
    const v = o[key];
    if (!Array.isArray(v)) {
      this.fail(`${path}.${key}`, "array", v);
      return [];
    }
    return v;
  }

  objects(o: Obj, path: string, key: string, each: (item: Obj, p: string) => void): void {
    this.arr(o, path, key).forEach((item, i) => {
      const p = `${path}.${key}[${i}]`;
      if (!isObj(item)) this.fail(p, "object", item);
      else each(item, p);
    });
  }

  strings(o: Obj, path: string, key: string): void {
    this.arr(o, path, key).forEach((item, i) => {
      if (typeof item !== "string") this.fail(`${path}.${key}[${i}]`, "string", item);
    });
  }

  oneOf(o: Obj, path: string, key: string, allowed: readonly string[]): void {
    const v = o[key];
    if (typeof v !== "string" || !allowed.includes(v)) {
      this.fail(`${path}.${key}`, `one of ${allowed.join("|")}`, v);
    }
  }
}

function describe(v: unknown): string {
  if (v === null) return "null";
  if (v === undefined) return "missing";
  if (Array.isArray(v)) return "array";
  return typeof v;
}

const ENTITY_KINDS: readonly string[] = [
  "disease", "anatomical", "feature", "change", "timex3", "testKey",
  "testVal", "medKey", "medVal", "remedy", "clinicalContext",
];
const CATEGORIES: readonly string[] = [
  "anatomicalGroup", "diseases", "test", "medicine", "clinicalTreatment",
];
const COLOR_TOKENS: readonly string[] = ["orange", "pink", "violet", "green", "lightgreen"];
const STYLE_FLAGS: readonly string[] = [
  "hollow", "strikethrough", "dashed", "gray", "cancelled", "outline",
];
const SPACINGS: readonly string[] = ["ordinal", "proportional"];
const SEVERITIES: readonly string[] = ["error", "warning"];

function checkDiagnostics(c: Checker, o: Obj, path: string): void {
  c.objects(o, path, "diagnostics", (d, p) => {
    c.oneOf(d, p, "severity", SEVERITIES);
    c.str(d, p, "code");
    c.str(d, p, "message");
  });
}

/** Validate a parsed JSON payload; returns it typed or throws SchemaError. */
export function validateView(data: unknown): View {
  const c = new Checker();
  if (!isObj(data)) throw new SchemaError(["payload is not a JSON object"]);
  if (data["schema"] !== VIEW_SCHEMA) {
    throw new SchemaError([`schema: expected "${VIEW_SCHEMA}", got ${describe(data["schema"])}`]);
  }

  c.str(data, "view", "sourceText");
  c.objects(data, "view", "entities", (e, p) => {
    c.str(e, p, "id");
    c.oneOf(e, p, "kind", ENTITY_KINDS);
    c.num(e, p, "start");
    c.num(e, p, "end");
    c.str(e, p, "surface");
  });

  const timeline = data["timeline"];
  if (!isObj(timeline)) {
    c.fail("view.timeline", "object", timeline);
  } else {
    c.str(timeline, "timeline", "docId");
    c.str(timeline, "timeline", "dct");
    c.objects(timeline, "timeline", "clusters", (k, p) => {
      c.str(k, p, "clusterId");
      c.str(k, p, "anchorTimexId");
      c.str(k, p, "anchorLabel");
      c.strOrNull(k, p, "resolvedDate");
      c.num(k, p, "orderIndex");
      c.strings(k, p, "members");
    });
    c.objects(timeline, "timeline", "bundles", (b, p) => {
      c.str(b, p, "rootId");
      c.oneOf(b, p, "rootKind", ENTITY_KINDS);
      c.str(b, p, "rootSurface");
      c.num(b, p, "rootStart");
      c.strings(b, p, "containedIds");
      c.strings(b, p, "features");
      c.objects(b, p, "changes", (ch, pc) => {
        c.str(ch, pc, "changeId");
        c.str(ch, pc, "surface");
      });
      c.strOrNull(b, p, "keyValue");
      c.strOrNull(b, p, "durationTimexId");
    });
    c.objects(timeline, "timeline", "spans", (s, p) => {
      c.str(s, p, "bundleRootId");
      c.num(s, p, "beginCluster");
      c.num(s, p, "endCluster");
      c.bool(s, p, "openStart");
      c.bool(s, p, "openEnd");
    });
    checkDiagnostics(c, timeline, "timeline");
  }

  const layout = data["layout"];
  if (!isObj(layout)) {
    c.fail("view.layout", "object", layout);
  } else {
    c.objects(layout, "layout", "columns", (col, p) => {
      c.str(col, p, "clusterId");
      c.num(col, p, "orderIndex");
      c.str(col, p, "label");
      c.strOrNull(col, p, "resolvedDate");
      c.num(col, p, "x");
      c.num(col, p, "width");
    });
    c.objects(layout, "layout", "rows", (r, p) => {
      c.str(r, p, "rowId");
      c.oneOf(r, p, "category", CATEGORIES);
      c.oneOf(r, p, "colorToken", COLOR_TOKENS);
      c.str(r, p, "label");
      c.num(r, p, "laneCount");
      c.num(r, p, "y");
      c.num(r, p, "height");
    });
    c.objects(layout, "layout", "bars", (b, p) => {
      c.str(b, p, "bundleRootId");
      c.str(b, p, "rowId");
      c.num(b, p, "lane");
      c.num(b, p, "startCol");
      c.num(b, p, "endCol");
      c.bool(b, p, "openStart");
      c.bool(b, p, "openEnd");
      c.str(b, p, "label");
      c.strings(b, p, "supplementalLabels");
      c.arr(b, p, "styleFlags").forEach((f, i) => {
        if (typeof f !== "string" || !STYLE_FLAGS.includes(f)) {
          c.fail(`${p}.styleFlags[${i}]`, `one of ${STYLE_FLAGS.join("|")}`, f);
        }
      });
    });
    c.objects(layout, "layout", "tables", (t, p) => {
      c.str(t, p, "tableId");
      c.str(t, p, "rowId");
      c.num(t, p, "lane");
      c.num(t, p, "anchorCol");
      c.objects(t, p, "entries", (e, pe) => {
        c.str(e, pe, "bundleRootId");
        c.str(e, pe, "key");
        c.str(e, pe, "value");
      });
    });
    const canvas = layout["canvas"];
    if (!isObj(canvas)) {
      c.fail("layout.canvas", "object", canvas);
    } else {
      for (const key of [
        "width", "height", "columnWidth", "laneHeight", "rowPadding",
        "labelWidth", "headerHeight", "legendHeight", "margin", "supplementalBudget",
      ]) {
        c.num(canvas, "layout.canvas", key);
      }
      c.oneOf(canvas, "layout.canvas", "spacing", SPACINGS);
      c.oneOf(canvas, "layout.canvas", "spacingEffective", SPACINGS);
    }
    const theme = layout["theme"];
    if (!isObj(theme)) {
      c.fail("layout.theme", "object", theme);
    } else {
      for (const token of COLOR_TOKENS) {
        if (typeof theme[token] !== "string") c.fail(`layout.theme.${token}`, "string", theme[token]);
      }
    }
    checkDiagnostics(c, layout, "layout");
  }

  if (c.problems.length) throw new SchemaError(c.problems);

  const view = data as unknown as View;
  crossCheck(view, c);
  if (c.problems.length) throw new SchemaError(c.problems);
  return view;
}

/** Referential integrity the renderer depends on. */
function crossCheck(view: View, c: Checker): void {
  const entityIds = new Set(view.entities.map((e) => e.id));
  const rowIds = new Set(view.layout.rows.map((r) => r.rowId));
  const colIndices = new Set(view.layout.columns.map((col) => col.orderIndex));
  for (const bar of view.layout.bars) {
    if (!rowIds.has(bar.rowId)) c.fail("layout.bars", `known rowId`, bar.rowId);
    if (!colIndices.has(bar.startCol)) c.fail("layout.bars", "known startCol", bar.startCol);
    if (!colIndices.has(bar.endCol)) c.fail("layout.bars", "known endCol", bar.endCol);
  }
  for (const table of view.layout.tables) {
    if (!rowIds.has(table.rowId)) c.fail("layout.tables", "known rowId", table.rowId);
    if (!colIndices.has(table.anchorCol)) c.fail("layout.tables", "known anchorCol", table.anchorCol);
  }
  for (const bundle of view.timeline.bundles) {
    for (const id of bundleClosure(bundle)) {
      if (!entityIds.has(id)) c.fail("timeline.bundles", "known entity id", id);
    }
  }
  for (const entity of view.entities) {
    if (entity.end > view.sourceText.length || entity.start < 0 || entity.start > entity.end) {
      c.fail(`entities.${entity.id}`, "offsets within sourceText", `${entity.start}..${entity.end}`);
    }
  }
}

/** Every entity id that belongs to a bundle: root, contained, features,
 * change notes, and the key's value. This is the hover-highlight set. */
export function bundleClosure(bundle: Bundle): string[] {
  const ids = [bundle.rootId, ...bundle.containedIds, ...bundle.features];
  for (const change of bundle.changes) ids.push(change.changeId);
  if (bundle.keyValue !== null) ids.push(bundle.keyValue);
  return ids;
}

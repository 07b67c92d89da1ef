"""Gantt-style layout: rows, lanes, bars, and key-value tables.

The layout model is purely geometric and self-contained: columns carry the
x positions computed from the chosen spacing mode, rows carry y extents
from lane packing, and the theme maps color tokens to hex values.  The SVG
renderer (and the browser viewer) draw from this model alone, so a layout
serialized to JSON re-renders byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .model import AnnotatedDocument, Certainty, Diagnostic, EntityKind, ExecState, Severity
from .temporal import Granularity, resolve_anchor
from .timeline import EntityBundle, Timeline


class RowCategory(str, Enum):
    ANATOMICAL_GROUP = "anatomicalGroup"
    DISEASES = "diseases"
    TEST = "test"
    MEDICINE = "medicine"
    CLINICAL_TREATMENT = "clinicalTreatment"


#: Fixed color tokens per row category.
COLOR_TOKEN_BY_CATEGORY = {
    RowCategory.ANATOMICAL_GROUP: "orange",
    RowCategory.DISEASES: "pink",
    RowCategory.TEST: "violet",
    RowCategory.MEDICINE: "green",
    RowCategory.CLINICAL_TREATMENT: "lightgreen",
}

#: Single theme table mapping color tokens to hex, shared by SVG and UI.
DEFAULT_THEME = {
    "orange": "#f59e0b",
    "pink": "#ec4899",
    "violet": "#8b5cf6",
    "green": "#22c55e",
    "lightgreen": "#a3e635",
}

_CATEGORY_RANK = {
    RowCategory.ANATOMICAL_GROUP: 0,
    RowCategory.DISEASES: 1,
    RowCategory.TEST: 2,
    RowCategory.MEDICINE: 3,
    RowCategory.CLINICAL_TREATMENT: 4,
}


@dataclass(frozen=True)
class LayoutConfig:
    """Rendering knobs; every field has a deterministic default."""

    spacing: str = "ordinal"  # "ordinal" | "proportional"
    show_empty_dct: bool = False
    column_width: int = 150
    lane_height: int = 30
    row_padding: int = 8
    label_width: int = 190
    header_height: int = 56
    legend_height: int = 40
    margin: int = 12
    supplemental_budget: int = 40
    day_px: int = 6
    max_gap: int = 600
    theme: dict | None = None

    def resolved_theme(self) -> dict:
        return dict(DEFAULT_THEME if self.theme is None else self.theme)


@dataclass(frozen=True)
class Column:
    cluster_id: str
    order_index: int
    label: str
    resolved_date: str | None
    x: int
    width: int


@dataclass(frozen=True)
class Row:
    row_id: str
    category: RowCategory
    color_token: str
    label: str
    lane_count: int = 0
    y: int = 0
    height: int = 0


@dataclass(frozen=True)
class Bar:
    bundle_root_id: str
    row_id: str
    lane: int
    start_col: int
    end_col: int
    open_start: bool
    open_end: bool
    label: str
    supplemental_labels: tuple[str, ...] = ()
    style_flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class TableEntry:
    bundle_root_id: str
    key: str
    value: str


@dataclass(frozen=True)
class KeyValueTable:
    table_id: str
    row_id: str
    lane: int
    anchor_col: int
    entries: tuple[TableEntry, ...]


@dataclass(frozen=True)
class CanvasMetrics:
    width: int
    height: int
    column_width: int
    lane_height: int
    row_padding: int
    label_width: int
    header_height: int
    legend_height: int
    margin: int
    supplemental_budget: int
    spacing: str
    spacing_effective: str


@dataclass(frozen=True)
class LayoutModel:
    columns: tuple[Column, ...]
    rows: tuple[Row, ...]
    bars: tuple[Bar, ...]
    tables: tuple[KeyValueTable, ...]
    canvas: CanvasMetrics
    theme: dict = field(default_factory=dict)
    diagnostics: tuple[Diagnostic, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "columns": [
                {
                    "clusterId": c.cluster_id,
                    "orderIndex": c.order_index,
                    "label": c.label,
                    "resolvedDate": c.resolved_date,
                    "x": c.x,
                    "width": c.width,
                }
                for c in self.columns
            ],
            "rows": [
                {
                    "rowId": r.row_id,
                    "category": r.category.value,
                    "colorToken": r.color_token,
                    "label": r.label,
                    "laneCount": r.lane_count,
                    "y": r.y,
                    "height": r.height,
                }
                for r in self.rows
            ],
            "bars": [
                {
                    "bundleRootId": b.bundle_root_id,
                    "rowId": b.row_id,
                    "lane": b.lane,
                    "startCol": b.start_col,
                    "endCol": b.end_col,
                    "openStart": b.open_start,
                    "openEnd": b.open_end,
                    "label": b.label,
                    "supplementalLabels": list(b.supplemental_labels),
                    "styleFlags": list(b.style_flags),
                }
                for b in self.bars
            ],
            "tables": [
                {
                    "tableId": t.table_id,
                    "rowId": t.row_id,
                    "lane": t.lane,
                    "anchorCol": t.anchor_col,
                    "entries": [
                        {"bundleRootId": e.bundle_root_id, "key": e.key, "value": e.value}
                        for e in t.entries
                    ],
                }
                for t in self.tables
            ],
            "canvas": {
                "width": self.canvas.width,
                "height": self.canvas.height,
                "columnWidth": self.canvas.column_width,
                "laneHeight": self.canvas.lane_height,
                "rowPadding": self.canvas.row_padding,
                "labelWidth": self.canvas.label_width,
                "headerHeight": self.canvas.header_height,
                "legendHeight": self.canvas.legend_height,
                "margin": self.canvas.margin,
                "supplementalBudget": self.canvas.supplemental_budget,
                "spacing": self.canvas.spacing,
                "spacingEffective": self.canvas.spacing_effective,
            },
            "theme": dict(self.theme),
            "diagnostics": [d.to_json_dict() for d in self.diagnostics],
        }


def layout_from_json(data: dict) -> LayoutModel:
    """Rebuild a :class:`LayoutModel` from its JSON form, losslessly."""
    canvas = data["canvas"]
    return LayoutModel(
        columns=tuple(
            Column(c["clusterId"], c["orderIndex"], c["label"], c["resolvedDate"], c["x"], c["width"])
            for c in data["columns"]
        ),
        rows=tuple(
            Row(r["rowId"], RowCategory(r["category"]), r["colorToken"], r["label"], r["laneCount"], r["y"], r["height"])
            for r in data["rows"]
        ),
        bars=tuple(
            Bar(
                b["bundleRootId"], b["rowId"], b["lane"], b["startCol"], b["endCol"],
                b["openStart"], b["openEnd"], b["label"],
                tuple(b["supplementalLabels"]), tuple(b["styleFlags"]),
            )
            for b in data["bars"]
        ),
        tables=tuple(
            KeyValueTable(
                t["tableId"], t["rowId"], t["lane"], t["anchorCol"],
                tuple(TableEntry(e["bundleRootId"], e["key"], e["value"]) for e in t["entries"]),
            )
            for t in data["tables"]
        ),
        canvas=CanvasMetrics(
            width=canvas["width"], height=canvas["height"], column_width=canvas["columnWidth"],
            lane_height=canvas["laneHeight"], row_padding=canvas["rowPadding"],
            label_width=canvas["labelWidth"], header_height=canvas["headerHeight"],
            legend_height=canvas["legendHeight"], margin=canvas["margin"],
            supplemental_budget=canvas["supplementalBudget"], spacing=canvas["spacing"],
            spacing_effective=canvas["spacingEffective"],
        ),
        theme=dict(data["theme"]),
        diagnostics=tuple(
            Diagnostic(Severity(d["severity"]), d["code"], d["message"], d["location"])
            for d in data["diagnostics"]
        ),
    )


_KEY_KINDS = frozenset({EntityKind.TEST_KEY, EntityKind.MED_KEY})


def assign_rows(timeline: Timeline, doc: AnnotatedDocument) -> tuple[list[Row], dict[str, str]]:
    """Map every bundle to a row.

    Bundles rooted at an anatomical entity get (or share) that anatomy's
    own group row; disease bundles with no anatomical container go to the
    single "Diseases" row; tests, medicines, and treatments each have a
    fixed row.  Orphan feature/change bundles ride along in "Diseases".
    Anatomical group rows keep first-mention order ahead of the fixed rows.
    """
    emap = doc.entity_map()
    rows: list[Row] = []
    seen: set[str] = set()
    placement: dict[str, str] = {}

    def ensure(row_id: str, category: RowCategory, label: str) -> str:
        if row_id not in seen:
            seen.add(row_id)
            rows.append(Row(row_id=row_id, category=category, color_token=COLOR_TOKEN_BY_CATEGORY[category], label=label))
        return row_id

    for b in timeline.bundles:
        root = emap[b.root_id]
        if root.kind is EntityKind.ANATOMICAL:
            rid = ensure(f"anat:{root.surface}", RowCategory.ANATOMICAL_GROUP, root.surface)
        elif root.kind is EntityKind.DISEASE:
            rid = ensure("diseases", RowCategory.DISEASES, "Diseases")
        elif root.kind in (EntityKind.TEST_KEY, EntityKind.TEST_VAL):
            rid = ensure("test", RowCategory.TEST, "Test")
        elif root.kind in (EntityKind.MED_KEY, EntityKind.MED_VAL):
            rid = ensure("medicine", RowCategory.MEDICINE, "Medicine")
        elif root.kind in (EntityKind.REMEDY, EntityKind.CLINICAL_CONTEXT):
            rid = ensure("treatment", RowCategory.CLINICAL_TREATMENT, "Clinical treatment")
        else:  # orphan feature/change bundles
            rid = ensure("diseases", RowCategory.DISEASES, "Diseases")
        placement[b.root_id] = rid

    rows.sort(key=lambda r: _CATEGORY_RANK[r.category])  # stable: keeps first-mention order within groups
    return rows, placement


def _disease_path_label(bundle: EntityBundle, emap: dict) -> str:
    """Label for an anatomical bundle: its contained diseases as nested paths.

    Chains render their first two levels with a nesting mark and flatten
    anything deeper onto the same line; sibling chains are comma-joined.
    """
    items = [
        (cid, depth)
        for cid, depth in zip(bundle.contained_ids, bundle.contained_depths)
        if emap[cid].kind is EntityKind.DISEASE
    ]
    if not items:
        return emap[bundle.root_id].surface
    groups: list[list[str]] = []
    group_depth = None
    for cid, depth in items:
        if group_depth is None or depth <= group_depth:
            groups.append([])
            group_depth = depth
        groups[-1].append(emap[cid].surface)
    parts = []
    for names in groups:
        text = " › ".join(names[:2])
        if len(names) > 2:
            text += " / " + " / ".join(names[2:])
        parts.append(text)
    return ", ".join(parts)


def _style_flags(root) -> tuple[str, ...]:
    flags: list[str] = []
    if root.certainty is Certainty.NEGATIVE:
        flags += ["hollow", "strikethrough"]
    elif root.certainty is Certainty.SUSPICIOUS:
        flags.append("dashed")
    elif root.certainty is Certainty.GENERAL:
        flags.append("gray")
    if root.state is ExecState.NEGATED:
        flags.append("cancelled")
    elif root.state is ExecState.SCHEDULED:
        flags.append("outline")
    return tuple(flags)


def _supplemental_labels(bundle: EntityBundle, emap: dict) -> tuple[str, ...]:
    labels = [emap[fid].surface for fid in bundle.features]
    for note in bundle.changes:
        text = emap[note.change_id].surface
        if note.ref_id and note.ref_id in emap:
            text += f" (re: {emap[note.ref_id].surface})"
        labels.append(text)
    return tuple(labels)


class _LanePacker:
    """Greedy first-fit packing of column intervals into lanes."""

    def __init__(self):
        self._lanes: list[list[tuple[int, int]]] = []

    def place(self, start: int, end: int, height: int = 1) -> int:
        lane = 0
        while True:
            if all(self._free(lane + i, start, end) for i in range(height)):
                for i in range(height):
                    self._occupy(lane + i, start, end)
                return lane
            lane += 1

    def _free(self, lane: int, start: int, end: int) -> bool:
        if lane >= len(self._lanes):
            return True
        return all(end < s or e < start for s, e in self._lanes[lane])

    def _occupy(self, lane: int, start: int, end: int):
        while lane >= len(self._lanes):
            self._lanes.append([])
        self._lanes[lane].append((start, end))

    @property
    def lane_count(self) -> int:
        return len(self._lanes)


def layout_bars(
    rows: list[Row],
    placement: dict[str, str],
    timeline: Timeline,
    doc: AnnotatedDocument,
    config: LayoutConfig | None = None,
) -> LayoutModel:
    """Produce the full geometric layout for an inferred timeline."""
    config = config or LayoutConfig()
    emap = doc.entity_map()
    diags: list[Diagnostic] = []
    span_by_root = {s.bundle_root_id: s for s in timeline.spans}

    # --- visible columns -------------------------------------------------
    touched: set[int] = set()
    for s in timeline.spans:
        touched.add(s.begin_cluster)
        touched.add(s.end_cluster)
    visible = []
    for c in timeline.clusters:  # already in order-index order
        if (
            c.cluster_id == "DCT"
            and not config.show_empty_dct
            and not c.members
            and c.order_index not in touched
        ):
            continue
        visible.append(c)

    spacing_effective = config.spacing
    resolved = {c.cluster_id: resolve_anchor(c.anchor, timeline.dct) for c in visible}
    if config.spacing == "proportional":
        if any(r is None or r.granularity is not Granularity.DAY for r in resolved.values()):
            spacing_effective = "ordinal"
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "proportional-fallback",
                    "not every visible cluster resolves to a calendar day; falling back to ordinal spacing",
                )
            )

    columns: list[Column] = []
    x = config.label_width + config.margin
    prev_date = None
    import datetime as _dt

    for i, c in enumerate(visible):
        r = resolved[c.cluster_id]
        date = _dt.date(r.year, r.month, r.day) if r is not None and r.granularity is Granularity.DAY else None
        if i > 0:
            if spacing_effective == "proportional":
                days = (date - prev_date).days
                gap = min(max(days * config.day_px, config.column_width), config.max_gap)
            else:
                gap = config.column_width
            x += gap
        columns.append(
            Column(
                cluster_id=c.cluster_id,
                order_index=c.order_index,
                label=c.anchor_label,
                resolved_date=r.iso() if r else None,
                x=x,
                width=config.column_width,
            )
        )
        prev_date = date

    # --- bars and tables --------------------------------------------------
    raw_bars: list[Bar] = []
    table_groups: dict[tuple[str, int], list[TableEntry]] = {}
    for b in timeline.bundles:
        root = emap[b.root_id]
        span = span_by_root[b.root_id]
        rid = placement[b.root_id]
        if root.kind in _KEY_KINDS and b.key_value is not None:
            entry = TableEntry(b.root_id, root.surface, emap[b.key_value].surface)
            table_groups.setdefault((rid, span.begin_cluster), []).append(entry)
            continue
        label = _disease_path_label(b, emap) if root.kind is EntityKind.ANATOMICAL else root.surface
        raw_bars.append(
            Bar(
                bundle_root_id=b.root_id,
                row_id=rid,
                lane=0,
                start_col=span.begin_cluster,
                end_col=span.end_cluster,
                open_start=span.open_start,
                open_end=span.open_end,
                label=label,
                supplemental_labels=_supplemental_labels(b, emap),
                style_flags=_style_flags(root),
            )
        )

    raw_tables = [
        KeyValueTable(table_id=f"tbl:{rid}:{col}", row_id=rid, lane=0, anchor_col=col, entries=tuple(entries))
        for (rid, col), entries in table_groups.items()
    ]

    # --- lane packing per row ----------------------------------------------
    bars: list[Bar] = []
    tables: list[KeyValueTable] = []
    packed_rows: list[Row] = []
    y = config.header_height + config.margin
    for row in rows:
        packer = _LanePacker()
        items = [("bar", b.start_col, b.end_col, 1, b.bundle_root_id, b) for b in raw_bars if b.row_id == row.row_id]
        items += [("tbl", t.anchor_col, t.anchor_col, len(t.entries), t.table_id, t) for t in raw_tables if t.row_id == row.row_id]
        items.sort(key=lambda it: (it[1], it[2], it[0], it[4]))
        for kind, start, end, height, _key, obj in items:
            lane = packer.place(start, end, height)
            if kind == "bar":
                bars.append(replace(obj, lane=lane))
            else:
                tables.append(replace(obj, lane=lane))
        lane_count = max(1, packer.lane_count)
        height = lane_count * config.lane_height + config.row_padding
        packed_rows.append(replace(row, lane_count=lane_count, y=y, height=height))
        y += height

    body_bottom = y

    # --- canvas ------------------------------------------------------------
    col_right = columns[-1].x + columns[-1].width if columns else config.label_width + config.margin + config.column_width
    width = col_right + config.margin
    col_geom = {c.order_index: c for c in columns}
    for b in bars:
        end = col_geom.get(b.end_col)
        if end is None:
            continue
        supp = " · ".join(b.supplemental_labels)
        approx = (end.x + end.width) + 14 + 6 * min(len(supp), config.supplemental_budget)
        width = max(width, approx + config.margin)
    height = body_bottom + config.legend_height + config.margin

    canvas = CanvasMetrics(
        width=width,
        height=height,
        column_width=config.column_width,
        lane_height=config.lane_height,
        row_padding=config.row_padding,
        label_width=config.label_width,
        header_height=config.header_height,
        legend_height=config.legend_height,
        margin=config.margin,
        supplemental_budget=config.supplemental_budget,
        spacing=config.spacing,
        spacing_effective=spacing_effective,
    )
    return LayoutModel(
        columns=tuple(columns),
        rows=tuple(packed_rows),
        bars=tuple(bars),
        tables=tuple(tables),
        canvas=canvas,
        theme=config.resolved_theme(),
        diagnostics=tuple(diags),
    )


def build_layout(timeline: Timeline, doc: AnnotatedDocument, config: LayoutConfig | None = None) -> LayoutModel:
    """Row assignment plus geometry in one call."""
    rows, placement = assign_rows(timeline, doc)
    return layout_bars(rows, placement, timeline, doc, config)

"""Static SVG rendering of a layout model.

The renderer is a pure function of the layout: no randomness, no set
iteration, no floating point in the geometry.  Rendering the same layout
twice yields byte-identical markup.
"""

from __future__ import annotations

from .layout import COLOR_TOKEN_BY_CATEGORY, Bar, KeyValueTable, LayoutModel, RowCategory

_TEXT_DARK = "#111827"
_TEXT_MUTED = "#6b7280"
_GRID = "#d1d5db"
_ROW_BAND_OPACITY = "0.12"
_GRAY_FILL = "#9ca3af"
_GRAY_EDGE = "#6b7280"
_CANCEL = "#b91c1c"

_LEGEND_ITEMS = [
    (RowCategory.ANATOMICAL_GROUP, "Anatomical group"),
    (RowCategory.DISEASES, "Diseases"),
    (RowCategory.TEST, "Test"),
    (RowCategory.MEDICINE, "Medicine"),
    (RowCategory.CLINICAL_TREATMENT, "Clinical treatment"),
]


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fit(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    return text[: max(budget - 1, 0)] + "…"


def _bar_paint(flags: tuple[str, ...], base: str) -> tuple[str, str, str]:
    """Return (fill, stroke, dasharray-or-empty) for a bar's style flags."""
    if "gray" in flags:
        return _GRAY_FILL, _GRAY_EDGE, ""
    if "hollow" in flags or "outline" in flags:
        return "#ffffff", base, ""
    if "dashed" in flags:
        return "#ffffff", base, "6 3"
    return base, base, ""


def render_svg(layout: LayoutModel) -> str:
    """Render a layout model to an SVG 1.1 document string."""
    c = layout.canvas
    theme = layout.theme
    out: list[str] = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{c.width}" height="{c.height}" '
        f'viewBox="0 0 {c.width} {c.height}" font-family="Helvetica, Arial, sans-serif">'
    )
    out.append(f'<rect x="0" y="0" width="{c.width}" height="{c.height}" fill="#ffffff"/>')

    body_top = c.header_height
    body_bottom = c.height - c.legend_height - c.margin

    # Column headers and gridlines.
    for col in layout.columns:
        cx = col.x + col.width // 2
        out.append(
            f'<text x="{cx}" y="{c.margin + 16}" font-size="13" font-weight="bold" '
            f'fill="{_TEXT_DARK}" text-anchor="middle">{_esc(_fit(col.label, 22))}</text>'
        )
        if col.resolved_date and col.resolved_date != col.label:
            out.append(
                f'<text x="{cx}" y="{c.margin + 32}" font-size="10" '
                f'fill="{_TEXT_MUTED}" text-anchor="middle">{_esc(col.resolved_date)}</text>'
            )
        out.append(
            f'<line x1="{col.x}" y1="{body_top}" x2="{col.x}" y2="{body_bottom}" '
            f'stroke="{_GRID}" stroke-width="1"/>'
        )

    # Row bands and labels.
    for row in layout.rows:
        base = theme.get(row.color_token, "#888888")
        out.append(
            f'<rect x="0" y="{row.y}" width="{c.width}" height="{row.height}" '
            f'fill="{base}" fill-opacity="{_ROW_BAND_OPACITY}"/>'
        )
        out.append(
            f'<text x="{c.margin}" y="{row.y + row.height // 2 + 4}" font-size="12" '
            f'font-weight="bold" fill="{_TEXT_DARK}">{_esc(_fit(row.label, 26))}</text>'
        )

    col_geom = {col.order_index: col for col in layout.columns}
    row_geom = {row.row_id: row for row in layout.rows}

    for bar in layout.bars:
        out.extend(_render_bar(bar, col_geom, row_geom, layout, theme))
    for table in layout.tables:
        out.extend(_render_table(table, col_geom, row_geom, layout, theme))

    # Legend: one swatch per category present.
    present = {row.category for row in layout.rows}
    lx = c.margin
    ly = body_bottom + c.margin + 10
    for category, label in _LEGEND_ITEMS:
        if category not in present:
            continue
        base = theme.get(COLOR_TOKEN_BY_CATEGORY[category], "#888888")
        out.append(f'<rect x="{lx}" y="{ly}" width="12" height="12" fill="{base}"/>')
        out.append(
            f'<text x="{lx + 18}" y="{ly + 10}" font-size="11" fill="{_TEXT_DARK}">{_esc(label)}</text>'
        )
        lx += 18 + 7 * len(label) + 24

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _render_bar(bar: Bar, col_geom, row_geom, layout: LayoutModel, theme) -> list[str]:
    out: list[str] = []
    c = layout.canvas
    row = row_geom[bar.row_id]
    start = col_geom.get(bar.start_col)
    end = col_geom.get(bar.end_col)
    if start is None or end is None:  # column hidden: nothing to draw
        return out
    base = theme.get(row.color_token, "#888888")
    bx = start.x + 4
    br = end.x + end.width - 4
    by = row.y + c.row_padding // 2 + bar.lane * c.lane_height + 3
    bh = c.lane_height - 6
    ymid = by + bh // 2
    fill, stroke, dash = _bar_paint(bar.style_flags, base)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    out.append(
        f'<rect x="{bx}" y="{by}" width="{br - bx}" height="{bh}" rx="4" '
        f'fill="{fill}" stroke="{stroke}" stroke-width="2"{dash_attr}/>'
    )
    if bar.open_start:
        out.append(
            f'<polygon points="{bx},{ymid - 6} {bx - 9},{ymid} {bx},{ymid + 6}" fill="{stroke}"/>'
        )
    if bar.open_end:
        out.append(
            f'<polygon points="{br},{ymid - 6} {br + 9},{ymid} {br},{ymid + 6}" fill="{stroke}"/>'
        )
    tx = bx + 8
    if "cancelled" in bar.style_flags:
        out.append(
            f'<line x1="{bx + 5}" y1="{by + 5}" x2="{bx + 15}" y2="{by + bh - 5}" '
            f'stroke="{_CANCEL}" stroke-width="2"/>'
        )
        out.append(
            f'<line x1="{bx + 15}" y1="{by + 5}" x2="{bx + 5}" y2="{by + bh - 5}" '
            f'stroke="{_CANCEL}" stroke-width="2"/>'
        )
        tx += 16
    deco = ' text-decoration="line-through"' if "strikethrough" in bar.style_flags else ""
    label_fill = _TEXT_DARK if fill == "#ffffff" or "gray" in bar.style_flags else "#ffffff"
    out.append(
        f'<text x="{tx}" y="{ymid + 4}" font-size="12" fill="{label_fill}"{deco}>'
        f"{_esc(_fit(bar.label, 34))}</text>"
    )
    if bar.supplemental_labels:
        supp = _fit(" · ".join(bar.supplemental_labels), c.supplemental_budget)
        sx = br + (14 if bar.open_end else 8)
        out.append(
            f'<text x="{sx}" y="{ymid + 4}" font-size="10" fill="{_TEXT_MUTED}">{_esc(supp)}</text>'
        )
    return out


def _render_table(table: KeyValueTable, col_geom, row_geom, layout: LayoutModel, theme) -> list[str]:
    out: list[str] = []
    c = layout.canvas
    row = row_geom[table.row_id]
    col = col_geom.get(table.anchor_col)
    if col is None:
        return out
    base = theme.get(row.color_token, "#888888")
    tx = col.x + 4
    tw = col.width - 8
    key_w = (tw * 9) // 20
    top = row.y + c.row_padding // 2 + table.lane * c.lane_height + 3
    for i, entry in enumerate(table.entries):
        ey = top + i * c.lane_height
        eh = c.lane_height - 6
        out.append(
            f'<rect x="{tx}" y="{ey}" width="{key_w}" height="{eh}" '
            f'fill="{base}" fill-opacity="0.25" stroke="{base}" stroke-width="1"/>'
        )
        out.append(
            f'<rect x="{tx + key_w}" y="{ey}" width="{tw - key_w}" height="{eh}" '
            f'fill="#ffffff" stroke="{base}" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{tx + 5}" y="{ey + eh // 2 + 4}" font-size="10" fill="{_TEXT_DARK}">'
            f"{_esc(_fit(entry.key, 12))}</text>"
        )
        out.append(
            f'<text x="{tx + key_w + 5}" y="{ey + eh // 2 + 4}" font-size="10" fill="{_TEXT_DARK}">'
            f"{_esc(_fit(entry.value, 14))}</text>"
        )
    th = len(table.entries) * c.lane_height - 6
    out.append(
        f'<rect x="{tx}" y="{top}" width="{tw}" height="{th}" fill="none" '
        f'stroke="{base}" stroke-width="2"/>'
    )
    return out

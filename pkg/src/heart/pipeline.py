"""One pipeline, two frontends.

Both the CLI and the HTTP service call :func:`process_document` and the
string helpers below, so for identical input and configuration they emit
byte-identical XML, JSON, and SVG.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .layout import LayoutConfig, LayoutModel, build_layout
from .model import AnnotatedDocument
from .svg import render_svg
from .temporal import LocaleTable
from .timeline import Timeline, build_timeline
from .view import canonical_json, timeline_to_view_json
from .wire import parse_document, serialize_document


@dataclass(frozen=True)
class PipelineResult:
    document: AnnotatedDocument
    timeline: Timeline
    layout: LayoutModel
    view: dict


def process_document(
    xml_text: str,
    *,
    dct: dt.date | None = None,
    locale_table: LocaleTable | None = None,
    layout_config: LayoutConfig | None = None,
) -> PipelineResult:
    """Parse annotated XML and run inference plus layout.

    Raises :class:`~heart.model.DocumentError` when the input has Error
    diagnostics; Warnings ride along on the returned timeline.
    """
    doc = parse_document(xml_text, dct_override=dct)
    timeline = build_timeline(doc, locale_table=locale_table)
    layout = build_layout(timeline, doc, layout_config)
    view = timeline_to_view_json(timeline, layout, doc)
    return PipelineResult(document=doc, timeline=timeline, layout=layout, view=view)


def canonical_xml(result: PipelineResult) -> str:
    return serialize_document(result.document)


def timeline_json(result: PipelineResult) -> str:
    return canonical_json(result.timeline.to_json_dict())


def view_json(result: PipelineResult) -> str:
    return canonical_json(result.view)


def svg_text(result: PipelineResult) -> str:
    return render_svg(result.layout)

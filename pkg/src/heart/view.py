"""The view document: everything a renderer needs in one JSON payload.

A view bundles the inferred timeline, the geometric layout, the source
text, and the entity table so that a browser client can draw the chart
and cross-highlight the prose without re-running any inference.
"""

from __future__ import annotations

import json

from .layout import LayoutModel, layout_from_json
from .model import AnnotatedDocument
from .timeline import Timeline

VIEW_SCHEMA = "heart-view/1"


def canonical_json(obj) -> str:
    """The one JSON serialization used everywhere an exact byte form matters."""
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def timeline_to_view_json(timeline: Timeline, layout: LayoutModel, doc: AnnotatedDocument) -> dict:
    """Assemble the complete view document for a processed document."""
    entities = []
    for e in doc.entities:
        entities.append(
            {
                "id": e.id,
                "kind": e.kind.value,
                "start": e.start,
                "end": e.end,
                "surface": e.surface,
                "certainty": e.certainty.value if e.certainty else None,
                "timexType": e.timex_type.value if e.timex_type else None,
                "state": e.state.value if e.state else None,
            }
        )
    return {
        "schema": VIEW_SCHEMA,
        "timeline": timeline.to_json_dict(),
        "layout": layout.to_json_dict(),
        "sourceText": doc.text,
        "entities": entities,
    }


def view_layout(view: dict) -> LayoutModel:
    """Extract the layout model back out of a view document."""
    if view.get("schema") != VIEW_SCHEMA:
        raise ValueError(f"unsupported view schema: {view.get('schema')!r}")
    return layout_from_json(view["layout"])

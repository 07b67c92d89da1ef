"""Chronological timelines from annotated clinical documents.

Pipeline stages, each usable on its own:

* :mod:`heart.wire` — parse/serialize the inline-XML annotation format.
* :mod:`heart.temporal` — normalize time expressions into anchors.
* :mod:`heart.timeline` — bundle, cluster, order, and span inference.
* :mod:`heart.layout` / :mod:`heart.svg` — chart geometry and rendering.
* :mod:`heart.evaluate` — similarity and placement-accuracy scoring.
* :mod:`heart.service` / :mod:`heart.cli` — HTTP and command-line frontends.
"""

from .evaluate import (
    AccuracyReport,
    GoldPlacement,
    bigram_overlap,
    placement_accuracy,
    timeline_similarity,
)
from .layout import LayoutConfig, LayoutModel, build_layout
from .model import (
    AnnotatedDocument,
    Certainty,
    Diagnostic,
    DocumentError,
    Entity,
    EntityKind,
    ExecState,
    Relation,
    RelationKind,
    Severity,
    TimexType,
    validate_document,
)
from .pipeline import PipelineResult, process_document
from .svg import render_svg
from .temporal import (
    AbsoluteAnchor,
    DurationAnchor,
    LocaleTable,
    RelativeAnchor,
    UnresolvedAnchor,
    compare_anchors,
    normalize_timex,
    resolve_anchor,
)
from .timeline import Timeline, build_timeline
from .view import canonical_json, timeline_to_view_json
from .wire import parse_document, serialize_document

__version__ = "0.1.0"

__all__ = [
    "AbsoluteAnchor",
    "AccuracyReport",
    "AnnotatedDocument",
    "Certainty",
    "Diagnostic",
    "DocumentError",
    "DurationAnchor",
    "Entity",
    "EntityKind",
    "ExecState",
    "GoldPlacement",
    "LayoutConfig",
    "LayoutModel",
    "LocaleTable",
    "PipelineResult",
    "Relation",
    "RelationKind",
    "RelativeAnchor",
    "Severity",
    "Timeline",
    "TimexType",
    "UnresolvedAnchor",
    "bigram_overlap",
    "build_layout",
    "build_timeline",
    "canonical_json",
    "compare_anchors",
    "normalize_timex",
    "parse_document",
    "placement_accuracy",
    "process_document",
    "render_svg",
    "resolve_anchor",
    "serialize_document",
    "timeline_similarity",
    "timeline_to_view_json",
    "validate_document",
    "__version__",
]

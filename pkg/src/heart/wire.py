"""Inline-XML wire format: parse annotated documents and serialize them back.

The on-disk format is a single ``<doc dct="YYYY-MM-DD">`` element whose
character content is the document text with entity tags inlined.  Spans
index the tag-free text, are half-open, and count Unicode code points.
Tags may nest; partial overlap is not representable and is rejected by the
XML parser itself.  ``parse_document(serialize_document(doc)) == doc`` for
every valid document.
"""

from __future__ import annotations

import datetime as dt
import xml.etree.ElementTree as ET

from .model import (
    DCT_ID,
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

#: Frozen tag <-> entity-kind mapping (see docs/wire-format.md).
TAG_BY_KIND = {
    EntityKind.DISEASE: "d",
    EntityKind.ANATOMICAL: "a",
    EntityKind.FEATURE: "f",
    EntityKind.CHANGE: "c",
    EntityKind.TIMEX3: "timex3",
    EntityKind.TEST_KEY: "t-key",
    EntityKind.TEST_VAL: "t-val",
    EntityKind.MED_KEY: "m-key",
    EntityKind.MED_VAL: "m-val",
    EntityKind.REMEDY: "r",
    EntityKind.CLINICAL_CONTEXT: "cc",
}
KIND_BY_TAG = {tag: kind for kind, tag in TAG_BY_KIND.items()}

_ROOT_TAG = "doc"
_ROOT_ATTRS = {"id", "dct"}

_ENUM_ATTRS = {
    "certainty": (Certainty, {EntityKind.DISEASE}),
    "type": (TimexType, {EntityKind.TIMEX3}),
    "state": (ExecState, {EntityKind.TEST_KEY, EntityKind.MED_KEY, EntityKind.REMEDY}),
}
_RELATION_KINDS = {k.value: k for k in RelationKind}


def _offset_of(text: str, line: int, column: int) -> int:
    """Convert a 1-based line / 0-based column pair to a character offset."""
    lines = text.splitlines(keepends=True)
    return sum(len(l) for l in lines[: line - 1]) + column


def parse_document(xml_text: str, dct_override: dt.date | None = None) -> AnnotatedDocument:
    """Parse the wire format into an :class:`AnnotatedDocument`.

    Raises :class:`DocumentError` carrying every diagnostic found when the
    input is malformed or violates a structural invariant; no partial
    document is returned on error.
    """
    diags: list[Diagnostic] = []
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        loc = _offset_of(xml_text, *exc.position) if exc.position else None
        raise DocumentError([Diagnostic(Severity.ERROR, "xml-syntax", f"malformed XML: {exc}", loc)]) from exc

    if root.tag != _ROOT_TAG:
        raise DocumentError(
            [Diagnostic(Severity.ERROR, "bad-root", f"root element must be <{_ROOT_TAG}>, got <{root.tag}>")]
        )
    for name in root.attrib:
        if name not in _ROOT_ATTRS:
            diags.append(Diagnostic(Severity.ERROR, "unknown-attribute", f"unknown attribute {name!r} on <{_ROOT_TAG}>"))

    dct = dct_override
    raw_dct = root.get("dct")
    if dct is None:
        if raw_dct is None:
            diags.append(Diagnostic(Severity.ERROR, "missing-dct", "document has no dct attribute and no override was given"))
        else:
            try:
                dct = dt.date.fromisoformat(raw_dct)
            except ValueError:
                diags.append(Diagnostic(Severity.ERROR, "bad-dct", f"dct {raw_dct!r} is not a YYYY-MM-DD date"))

    entities: list[Entity] = []
    relations: list[Relation] = []
    text = _collect(root, 0, entities, relations, diags)

    doc = AnnotatedDocument(
        doc_id=root.get("id", ""),
        text=text,
        dct=dct or dt.date.min,
        entities=tuple(entities),
        relations=tuple(relations),
    )
    diags.extend(validate_document(doc))
    if any(d.severity is Severity.ERROR for d in diags):
        raise DocumentError(diags)
    return doc


def _collect(elem, start: int, entities: list[Entity], relations: list[Relation], diags: list[Diagnostic]) -> str:
    """Depth-first walk computing tag-free text and entity offsets."""
    pieces = [elem.text or ""]
    pos = start + len(pieces[0])
    for child in elem:
        inner = _collect(child, pos, entities, relations, diags)
        _build_entity(child, pos, pos + len(inner), inner, entities, relations, diags)
        pieces.append(inner)
        pos += len(inner)
        tail = child.tail or ""
        pieces.append(tail)
        pos += len(tail)
    return "".join(pieces)


def _build_entity(elem, start, end, surface, entities, relations, diags):
    kind = KIND_BY_TAG.get(elem.tag)
    if kind is None:
        diags.append(Diagnostic(Severity.ERROR, "unknown-tag", f"unknown tag <{elem.tag}>", start))
        return

    eid = elem.get("id")
    if eid is None:
        diags.append(Diagnostic(Severity.ERROR, "missing-id", f"<{elem.tag}> element has no id attribute", start))
        return

    attrs: dict[str, object] = {}
    for name, raw in elem.attrib.items():
        if name in ("id", "rel"):
            continue
        spec = _ENUM_ATTRS.get(name)
        if spec is None:
            diags.append(Diagnostic(Severity.ERROR, "unknown-attribute", f"unknown attribute {name!r} on <{elem.tag}>", start))
            continue
        enum_cls, allowed_kinds = spec
        try:
            value = enum_cls(raw)
        except ValueError:
            diags.append(
                Diagnostic(Severity.ERROR, "bad-attribute-value", f"{name}={raw!r} is not one of {[m.value for m in enum_cls]}", start)
            )
            continue
        # Kind/attribute pairing is re-checked by validate_document; store as-is.
        attrs[{"certainty": "certainty", "type": "timex_type", "state": "state"}[name]] = value

    for chunk in (elem.get("rel") or "").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        rel_kind, sep, target = chunk.partition(":")
        if not sep or not target:
            diags.append(Diagnostic(Severity.ERROR, "bad-relation", f"relation {chunk!r} is not of the form kind:targetId", start))
            continue
        kind_enum = _RELATION_KINDS.get(rel_kind)
        if kind_enum is None:
            diags.append(Diagnostic(Severity.ERROR, "bad-relation-kind", f"unknown relation kind {rel_kind!r}", start))
            continue
        relations.append(Relation(kind_enum, eid, target))

    entities.append(Entity(id=eid, kind=kind, start=start, end=end, surface=surface, **attrs))


def _escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(s: str) -> str:
    return _escape_text(s).replace('"', "&quot;")


def serialize_document(doc: AnnotatedDocument) -> str:
    """Emit the canonical wire form of a valid document.

    Attribute order is fixed (id, type, certainty, state, rel) and escaping
    is minimal, so serialization is deterministic.
    """
    rels_by_source: dict[str, list[Relation]] = {}
    for r in doc.relations:
        rels_by_source.setdefault(r.source_id, []).append(r)

    parts = [f"<{_ROOT_TAG}"]
    if doc.doc_id:
        parts.append(f' id="{_escape_attr(doc.doc_id)}"')
    parts.append(f' dct="{doc.dct.isoformat()}">')

    stack: list[Entity] = []
    pos = 0

    def emit_text(upto: int):
        nonlocal pos
        if upto > pos:
            parts.append(_escape_text(doc.text[pos:upto]))
            pos = upto

    def close_top():
        nonlocal pos
        top = stack.pop()
        emit_text(top.end)
        parts.append(f"</{TAG_BY_KIND[top.kind]}>")

    for e in doc.entities:  # canonical order: document order, outermost first
        while stack and stack[-1].end <= e.start:
            close_top()
        if stack and e.start < stack[-1].end < e.end:
            raise ValueError(f"entities {stack[-1].id!r} and {e.id!r} overlap without nesting")
        emit_text(e.start)
        parts.append(_open_tag(e, rels_by_source.get(e.id, [])))
        stack.append(e)
    while stack:
        close_top()
    emit_text(len(doc.text))
    parts.append(f"</{_ROOT_TAG}>")
    return "".join(parts)


def _open_tag(e: Entity, rels: list[Relation]) -> str:
    bits = [f"<{TAG_BY_KIND[e.kind]}", f' id="{_escape_attr(e.id)}"']
    if e.timex_type is not None:
        bits.append(f' type="{e.timex_type.value}"')
    if e.certainty is not None:
        bits.append(f' certainty="{e.certainty.value}"')
    if e.state is not None:
        bits.append(f' state="{e.state.value}"')
    if rels:
        encoded = ";".join(f"{r.kind.value}:{r.target_id}" for r in rels)
        bits.append(f' rel="{_escape_attr(encoded)}"')
    bits.append(">")
    return "".join(bits)

"""Typed data model for annotated clinical documents.

An annotated document is plain text plus typed entity spans and typed
directed relations between entities.  Temporal relations may also target
the reserved pseudo-entity ``DCT`` (the document creation time), which acts
as an implicit date-typed time expression without a surface span.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from enum import Enum

#: Reserved id for the document-creation-time pseudo entity.
DCT_ID = "DCT"


class EntityKind(str, Enum):
    """Entity categories; test and medicine items split into key/value parts."""

    DISEASE = "disease"
    ANATOMICAL = "anatomical"
    FEATURE = "feature"
    CHANGE = "change"
    TIMEX3 = "timex3"
    TEST_KEY = "testKey"
    TEST_VAL = "testVal"
    MED_KEY = "medKey"
    MED_VAL = "medVal"
    REMEDY = "remedy"
    CLINICAL_CONTEXT = "clinicalContext"


class Certainty(str, Enum):
    """Assertion status of a disease mention."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    SUSPICIOUS = "suspicious"
    GENERAL = "general"


class TimexType(str, Enum):
    """Subtype of a time expression."""

    DATE = "date"
    TIME = "time"
    DURATION = "duration"
    SET = "set"
    AGE = "age"
    MEDICAL = "medical"
    MISC = "misc"


class ExecState(str, Enum):
    """Execution status of a test, medicine, or remedy."""

    EXECUTED = "executed"
    NEGATED = "negated"
    SCHEDULED = "scheduled"
    OTHER = "other"


class RelationKind(str, Enum):
    """Directed relation labels between entities."""

    CHANGE_SBJ = "changeSbj"
    CHANGE_REF = "changeRef"
    FEATURE_SBJ = "featureSbj"
    SUB_REGION = "subRegion"
    KEY_VALUE = "keyValue"
    TIME_ON = "timeOn"
    TIME_BEFORE = "timeBefore"
    TIME_AFTER = "timeAfter"
    TIME_BEGIN = "timeBegin"
    TIME_END = "timeEnd"


#: Relation kinds whose target must be a time expression (or ``DCT``).
TEMPORAL_KINDS = frozenset(
    {
        RelationKind.TIME_ON,
        RelationKind.TIME_BEFORE,
        RelationKind.TIME_AFTER,
        RelationKind.TIME_BEGIN,
        RelationKind.TIME_END,
    }
)

_RELATION_ORDER = {kind: i for i, kind in enumerate(RelationKind)}


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A machine-readable problem report tied to an optional text offset."""

    severity: Severity
    code: str
    message: str
    location: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "location": self.location,
        }


@dataclass(frozen=True)
class Entity:
    """A typed, attribute-bearing span of document text.

    ``start``/``end`` is a half-open interval of character offsets (Unicode
    code points) into the tag-free document text; ``surface`` always equals
    the corresponding text slice in a valid document.
    """

    id: str
    kind: EntityKind
    start: int
    end: int
    surface: str
    certainty: Certainty | None = None
    timex_type: TimexType | None = None
    state: ExecState | None = None


@dataclass(frozen=True)
class Relation:
    """A directed, typed link from one entity to another (or to ``DCT``)."""

    kind: RelationKind
    source_id: str
    target_id: str


def _canonical_entities(entities) -> tuple[Entity, ...]:
    # Document order, outermost-first for equal starts; ties broken by id so
    # that equality is insensitive to input list order.
    return tuple(sorted(entities, key=lambda e: (e.start, -e.end, e.id)))


def _canonical_relations(relations, entities) -> tuple[Relation, ...]:
    pos = {e.id: i for i, e in enumerate(entities)}
    big = len(entities)

    def key(r: Relation):
        return (
            pos.get(r.source_id, big),
            r.source_id,
            _RELATION_ORDER[r.kind],
            pos.get(r.target_id, big),
            r.target_id,
        )

    return tuple(sorted(relations, key=key))


@dataclass(frozen=True)
class AnnotatedDocument:
    """Immutable document: text, creation date, entities, and relations.

    Entity and relation order is canonicalized on construction, so two
    documents with the same content compare equal regardless of the order
    in which their annotations were supplied.
    """

    doc_id: str
    text: str
    dct: dt.date
    entities: tuple[Entity, ...] = ()
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        ents = _canonical_entities(self.entities)
        object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "relations", _canonical_relations(self.relations, ents))

    def entity_map(self) -> dict[str, Entity]:
        return {e.id: e for e in self.entities}

    def relations_from(self, source_id: str) -> tuple[Relation, ...]:
        return tuple(r for r in self.relations if r.source_id == source_id)


class DocumentError(Exception):
    """Raised when a document cannot be parsed or fails validation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity is Severity.ERROR]
        head = errors[0] if errors else (self.diagnostics[0] if self.diagnostics else None)
        super().__init__(head.message if head else "invalid document")


_KEY_VALUE_PAIRS = {
    EntityKind.TEST_KEY: EntityKind.TEST_VAL,
    EntityKind.MED_KEY: EntityKind.MED_VAL,
}

_STATE_KINDS = frozenset({EntityKind.TEST_KEY, EntityKind.MED_KEY, EntityKind.REMEDY})
_SUB_REGION_SOURCES = frozenset({EntityKind.ANATOMICAL, EntityKind.DISEASE})


def validate_document(doc: AnnotatedDocument) -> list[Diagnostic]:
    """Check every structural invariant; return all violations found.

    Errors make the document unusable by strict operations; warnings flag
    suspicious-but-tolerable annotation (for example a change entity with
    no subject).
    """
    diags: list[Diagnostic] = []
    err = lambda code, msg, loc=None: diags.append(Diagnostic(Severity.ERROR, code, msg, loc))
    warn = lambda code, msg, loc=None: diags.append(Diagnostic(Severity.WARNING, code, msg, loc))

    seen: dict[str, Entity] = {}
    for e in doc.entities:
        if e.id == DCT_ID:
            err("reserved-id", f"entity id {DCT_ID!r} is reserved for the document creation time", e.start)
        if e.id in seen:
            err("duplicate-id", f"duplicate entity id {e.id!r}", e.start)
        seen[e.id] = e

        if not (0 <= e.start < e.end <= len(doc.text)):
            err("span-out-of-bounds", f"entity {e.id!r} span [{e.start}, {e.end}) is out of bounds", e.start)
        elif doc.text[e.start : e.end] != e.surface:
            err(
                "surface-mismatch",
                f"entity {e.id!r} surface {e.surface!r} does not match text slice "
                f"{doc.text[e.start:e.end]!r}",
                e.start,
            )

        if e.certainty is not None and e.kind is not EntityKind.DISEASE:
            err("attribute-kind-mismatch", f"certainty is only valid on disease entities, not {e.kind.value}", e.start)
        if e.timex_type is not None and e.kind is not EntityKind.TIMEX3:
            err("attribute-kind-mismatch", f"type is only valid on timex3 entities, not {e.kind.value}", e.start)
        if e.timex_type is None and e.kind is EntityKind.TIMEX3:
            err("missing-timex-type", f"timex3 entity {e.id!r} has no type attribute", e.start)
        if e.state is not None and e.kind not in _STATE_KINDS:
            err("attribute-kind-mismatch", f"state is only valid on test/medicine keys and remedies, not {e.kind.value}", e.start)

    # Partial (non-nested) overlap detection over canonically ordered spans.
    stack: list[Entity] = []
    for e in doc.entities:
        while stack and stack[-1].end <= e.start:
            stack.pop()
        if stack and e.start < stack[-1].end < e.end:
            err(
                "overlapping-spans",
                f"entities {stack[-1].id!r} and {e.id!r} overlap without nesting",
                e.start,
            )
        stack.append(e)

    for r in doc.relations:
        src = seen.get(r.source_id)
        if src is None:
            err("dangling-relation", f"relation {r.kind.value} has unknown source {r.source_id!r}")
            continue
        tgt = seen.get(r.target_id)
        if r.kind in TEMPORAL_KINDS:
            if r.target_id == DCT_ID:
                continue
            if tgt is None:
                err("dangling-relation", f"relation {r.kind.value} has unknown target {r.target_id!r}", src.start)
            elif tgt.kind is not EntityKind.TIMEX3:
                err(
                    "temporal-target-not-timex",
                    "temporal relation target must be TIMEX3",
                    src.start,
                )
            continue
        if tgt is None:
            err("dangling-relation", f"relation {r.kind.value} has unknown target {r.target_id!r}", src.start)
            continue
        if r.kind is RelationKind.KEY_VALUE:
            expected = _KEY_VALUE_PAIRS.get(src.kind)
            if expected is None:
                err("relation-kind-mismatch", f"keyValue source must be a test or medicine key, not {src.kind.value}", src.start)
            elif tgt.kind is not expected:
                err(
                    "relation-kind-mismatch",
                    f"keyValue from {src.kind.value} must target {expected.value}, not {tgt.kind.value}",
                    src.start,
                )
        elif r.kind is RelationKind.FEATURE_SBJ and src.kind is not EntityKind.FEATURE:
            err("relation-kind-mismatch", f"featureSbj source must be a feature, not {src.kind.value}", src.start)
        elif r.kind in (RelationKind.CHANGE_SBJ, RelationKind.CHANGE_REF) and src.kind is not EntityKind.CHANGE:
            err("relation-kind-mismatch", f"{r.kind.value} source must be a change, not {src.kind.value}", src.start)
        elif r.kind is RelationKind.SUB_REGION and src.kind not in _SUB_REGION_SOURCES:
            err(
                "relation-kind-mismatch",
                f"subRegion source must be anatomical or disease, not {src.kind.value}",
                src.start,
            )

    sourced = {(r.source_id, r.kind) for r in doc.relations}
    for e in doc.entities:
        if e.kind is EntityKind.CHANGE and (e.id, RelationKind.CHANGE_SBJ) not in sourced:
            warn("orphan-change", f"orphan change: {e.surface!r} has no changeSbj relation", e.start)
        elif e.kind is EntityKind.FEATURE and (e.id, RelationKind.FEATURE_SBJ) not in sourced:
            warn("orphan-feature", f"orphan feature: {e.surface!r} has no featureSbj relation", e.start)

    return diags


def dedupe_diagnostics(diags) -> tuple[Diagnostic, ...]:
    """Drop exact repeats while preserving first-occurrence order."""
    out: list[Diagnostic] = []
    seen = set()
    for d in diags:
        key = (d.severity, d.code, d.message, d.location)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return tuple(out)

"""Chronology inference: bundles, time clusters, ordering, and spans.

The pipeline mirrors how a reader reconstructs a history from a note:

1. entities connected by containment (``subRegion``) or supplemental
   relations collapse into bundles;
2. each bundle joins the time cluster of its root's anchoring time
   expression, with the document creation time (``DCT``) as the default
   container for untimed bundles;
3. clusters are ordered by normalized-anchor comparison plus explicit
   before/after relations (topological sort, document order as tie-break);
4. begin/end/before/after relations on bundle roots become column spans.

Every step is total: structurally valid but semantically messy input
(cycles, conflicting anchors, repeated relations) degrades to diagnostics,
never to an exception.
"""

from __future__ import annotations

import datetime as dt
import heapq
from dataclasses import dataclass, replace

from .model import (
    DCT_ID,
    TEMPORAL_KINDS,
    AnnotatedDocument,
    Diagnostic,
    DocumentError,
    EntityKind,
    RelationKind,
    Severity,
    TimexType,
    dedupe_diagnostics,
    validate_document,
)
from .temporal import (
    AbsoluteAnchor,
    AnchorOrder,
    LocaleTable,
    TimeAnchor,
    compare_anchors,
    normalize_timex,
    resolve_anchor,
)

TIMELINE_SCHEMA = "heart-timeline/1"


@dataclass(frozen=True)
class ChangeNote:
    """A change entity attached to a bundle, with its optional reference."""

    change_id: str
    ref_id: str | None = None
    change_surface: str = ""
    ref_surface: str | None = None


@dataclass(frozen=True)
class EntityBundle:
    """A root entity plus everything bundled onto it.

    ``contained_ids`` lists the subRegion closure in depth-first document
    order; ``contained_depths`` gives each entry's nesting depth (1 = direct
    child of the root), which preserves the containment tree shape.
    """

    root_id: str
    root_kind: EntityKind = EntityKind.DISEASE
    root_qualifier: str | None = None
    root_surface: str = ""
    root_start: int = -1
    contained_ids: tuple[str, ...] = ()
    contained_depths: tuple[int, ...] = ()
    features: tuple[str, ...] = ()
    changes: tuple[ChangeNote, ...] = ()
    key_value: str | None = None
    duration_timex_id: str | None = None


@dataclass(frozen=True)
class TimeCluster:
    """A bag of bundles anchored to one time expression (one column)."""

    cluster_id: str
    anchor_timex_id: str
    anchor_label: str
    anchor: TimeAnchor
    members: tuple[str, ...] = ()
    order_index: int = -1


@dataclass(frozen=True)
class EntitySpan:
    """A bundle's column extent in cluster order-index coordinates."""

    bundle_root_id: str
    begin_cluster: int
    end_cluster: int
    open_start: bool = False
    open_end: bool = False


@dataclass(frozen=True)
class Timeline:
    doc_id: str
    dct: dt.date
    clusters: tuple[TimeCluster, ...]
    bundles: tuple[EntityBundle, ...]
    spans: tuple[EntitySpan, ...]
    diagnostics: tuple[Diagnostic, ...] = ()

    def to_json_dict(self) -> dict:
        clusters = []
        for c in self.clusters:
            resolved = resolve_anchor(c.anchor, self.dct)
            clusters.append(
                {
                    "clusterId": c.cluster_id,
                    "anchorTimexId": c.anchor_timex_id,
                    "anchorLabel": c.anchor_label,
                    "resolvedDate": resolved.iso() if resolved else None,
                    "orderIndex": c.order_index,
                    "members": list(c.members),
                }
            )
        return {
            "schema": TIMELINE_SCHEMA,
            "docId": self.doc_id,
            "dct": self.dct.isoformat(),
            "clusters": clusters,
            "bundles": [
                {
                    "rootId": b.root_id,
                    "rootKind": b.root_kind.value,
                    "rootQualifier": b.root_qualifier,
                    "rootSurface": b.root_surface,
                    "rootStart": b.root_start,
                    "containedIds": list(b.contained_ids),
                    "containedDepths": list(b.contained_depths),
                    "features": list(b.features),
                    "changes": [
                        {
                            "changeId": ch.change_id,
                            "refId": ch.ref_id,
                            "surface": ch.change_surface,
                            "refSurface": ch.ref_surface,
                        }
                        for ch in b.changes
                    ],
                    "keyValue": b.key_value,
                    "durationTimexId": b.duration_timex_id,
                }
                for b in self.bundles
            ],
            "spans": [
                {
                    "bundleRootId": s.bundle_root_id,
                    "beginCluster": s.begin_cluster,
                    "endCluster": s.end_cluster,
                    "openStart": s.open_start,
                    "openEnd": s.open_end,
                }
                for s in self.spans
            ],
            "diagnostics": [d.to_json_dict() for d in self.diagnostics],
        }


def _warn(code: str, message: str, location: int | None = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, location)


def _error(code: str, message: str, location: int | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, location)


def _is_ancestor(candidate: str, node: str, parent: dict[str, str]) -> bool:
    while node in parent:
        node = parent[node]
        if node == candidate:
            return True
    return False


def bundle_entities(doc: AnnotatedDocument) -> tuple[list[EntityBundle], list[Diagnostic]]:
    """Collapse related entities into bundles.

    Containment sets of distinct bundles stay disjoint: a subRegion edge
    that would give an entity a second container is dropped with a warning,
    and one that would close a containment cycle is dropped with an error.
    Unrelated non-timex entities become singleton bundles.
    """
    diags: list[Diagnostic] = []
    emap = doc.entity_map()

    parent: dict[str, str] = {}
    children: dict[str, list[str]] = {}
    for r in doc.relations:
        if r.kind is not RelationKind.SUB_REGION:
            continue
        tgt = emap[r.target_id]
        if tgt.kind is EntityKind.TIMEX3:
            diags.append(_warn("subregion-timex-target", f"subRegion cannot contain time expression {r.target_id!r}; relation dropped", tgt.start))
            continue
        if r.target_id == r.source_id or _is_ancestor(r.target_id, r.source_id, parent):
            diags.append(
                _error(
                    "subregion-cycle",
                    f"subRegion cycle through {r.source_id!r} -> {r.target_id!r}; relation dropped",
                    emap[r.source_id].start,
                )
            )
            continue
        if r.target_id in parent:
            diags.append(
                _warn(
                    "subregion-conflict",
                    f"{r.target_id!r} is already contained in {parent[r.target_id]!r}; subRegion from {r.source_id!r} dropped",
                    tgt.start,
                )
            )
            continue
        parent[r.target_id] = r.source_id
        children.setdefault(r.source_id, []).append(r.target_id)

    feature_subject: dict[str, str] = {}
    change_subject: dict[str, str] = {}
    change_ref: dict[str, str] = {}
    key_value: dict[str, str] = {}
    value_key: dict[str, str] = {}

    for r in doc.relations:
        if r.kind in (RelationKind.FEATURE_SBJ, RelationKind.CHANGE_SBJ):
            subjects = feature_subject if r.kind is RelationKind.FEATURE_SBJ else change_subject
            if r.source_id in parent:
                diags.append(_warn("contained-supplement", f"{r.source_id!r} is contained in a bundle; {r.kind.value} dropped", emap[r.source_id].start))
            elif r.source_id in subjects:
                diags.append(_warn("multiple-subject", f"{r.source_id!r} has several {r.kind.value} subjects; keeping the first", emap[r.source_id].start))
            else:
                subjects[r.source_id] = r.target_id
        elif r.kind is RelationKind.CHANGE_REF:
            if r.source_id in change_ref:
                diags.append(_warn("multiple-change-ref", f"{r.source_id!r} has several changeRef targets; keeping the first", emap[r.source_id].start))
            else:
                change_ref[r.source_id] = r.target_id
        elif r.kind is RelationKind.KEY_VALUE:
            key, val = r.source_id, r.target_id
            if key in parent or val in parent:
                diags.append(_warn("keyvalue-nonroot", f"keyValue {key!r} -> {val!r} involves a contained entity; dropped", emap[key].start))
            elif key in key_value:
                diags.append(_warn("multiple-keyvalue", f"key {key!r} has several values; keeping the first", emap[key].start))
            elif val in value_key:
                diags.append(_warn("keyvalue-conflict", f"value {val!r} is already paired with {value_key[val]!r}; dropped", emap[val].start))
            else:
                key_value[key] = val
                value_key[val] = key

    def owner_root(eid: str, trail: tuple[str, ...] = ()) -> str | None:
        if eid in trail:
            return None
        trail = trail + (eid,)
        if eid in parent:
            return owner_root(parent[eid], trail)
        if eid in feature_subject:
            return owner_root(feature_subject[eid], trail)
        if eid in change_subject:
            return owner_root(change_subject[eid], trail)
        if eid in value_key:
            return owner_root(value_key[eid], trail)
        return eid

    bundle_features: dict[str, list[str]] = {}
    bundle_changes: dict[str, list[ChangeNote]] = {}
    attached: set[str] = set()

    for e in doc.entities:
        subjects = feature_subject if e.id in feature_subject else change_subject if e.id in change_subject else None
        if subjects is None:
            continue
        root = owner_root(e.id)
        if root is None or emap[root].kind is EntityKind.TIMEX3:
            diags.append(_warn("unattachable-supplement", f"{e.id!r} does not resolve to a bundle; kept as its own bundle", e.start))
            subjects.pop(e.id)
            continue
        if e.kind is EntityKind.FEATURE:
            bundle_features.setdefault(root, []).append(e.id)
        else:
            ref_id = change_ref.get(e.id)
            ref_surface = emap[ref_id].surface if ref_id in emap else None
            bundle_changes.setdefault(root, []).append(ChangeNote(e.id, ref_id, e.surface, ref_surface))
        attached.add(e.id)

    attached.update(key_value.values())

    bundles: list[EntityBundle] = []
    for e in doc.entities:
        if e.kind is EntityKind.TIMEX3 or e.id in parent or e.id in attached:
            continue
        contained: list[str] = []
        depths: list[int] = []

        def walk(eid: str, depth: int):
            for child in children.get(eid, []):
                contained.append(child)
                depths.append(depth)
                walk(child, depth + 1)

        walk(e.id, 1)
        duration_id = None
        for r in doc.relations:
            if r.source_id == e.id and r.kind in TEMPORAL_KINDS:
                t = emap.get(r.target_id)
                if t is not None and t.kind is EntityKind.TIMEX3 and t.timex_type is TimexType.DURATION:
                    duration_id = r.target_id
                    break
        bundles.append(
            EntityBundle(
                root_id=e.id,
                root_kind=e.kind,
                root_qualifier=(e.certainty.value if e.certainty else e.state.value if e.state else None),
                root_surface=e.surface,
                root_start=e.start,
                contained_ids=tuple(contained),
                contained_depths=tuple(depths),
                features=tuple(bundle_features.get(e.id, [])),
                changes=tuple(bundle_changes.get(e.id, [])),
                key_value=key_value.get(e.id),
                duration_timex_id=duration_id,
            )
        )
    return bundles, diags


_MEMBERSHIP_PRIORITY = (
    RelationKind.TIME_ON,
    RelationKind.TIME_BEGIN,
    RelationKind.TIME_END,
    RelationKind.TIME_BEFORE,
    RelationKind.TIME_AFTER,
)


def _select_temporal_targets(
    doc: AnnotatedDocument, root_id: str, valid_targets: set[str], emap: dict
) -> tuple[dict[RelationKind, str], list[Diagnostic]]:
    """Pick one target per temporal relation kind on a bundle root.

    When a kind occurs several times the earliest-mentioned target wins and
    the extras are demoted to a warning.  ``DCT`` counts as mentioned after
    every real time expression.
    """
    by_kind: dict[RelationKind, list[str]] = {}
    for r in doc.relations:
        if r.source_id == root_id and r.kind in TEMPORAL_KINDS and r.target_id in valid_targets:
            by_kind.setdefault(r.kind, []).append(r.target_id)

    def mention(tid: str):
        return (1, 0) if tid == DCT_ID else (0, emap[tid].start)

    chosen: dict[RelationKind, str] = {}
    warns: list[Diagnostic] = []
    for kind, targets in by_kind.items():
        ordered = sorted(set(targets), key=lambda t: (mention(t), t))
        chosen[kind] = ordered[0]
        if len(ordered) > 1:
            warns.append(
                _warn(
                    "multiple-temporal-target",
                    f"multiple {kind.value} relations on {root_id!r}; keeping earliest-mentioned target {ordered[0]!r}",
                    emap[root_id].start,
                )
            )
    return chosen, warns


def build_clusters(
    doc: AnnotatedDocument,
    bundles: list[EntityBundle],
    locale_table: LocaleTable | None = None,
) -> tuple[list[TimeCluster], list[Diagnostic]]:
    """Create one (unordered) cluster per anchorable time expression plus DCT.

    Every non-duration time expression anchors a cluster so that span and
    ordering indexes stay total; duration expressions never do.  Each bundle
    joins the cluster of its root's anchoring relation, falling back to the
    DCT cluster when the root has no usable temporal relation.
    """
    diags: list[Diagnostic] = []
    emap = doc.entity_map()
    anchorable = [e for e in doc.entities if e.kind is EntityKind.TIMEX3 and e.timex_type is not TimexType.DURATION]
    cluster_ids = [e.id for e in anchorable] + [DCT_ID]
    members: dict[str, list[str]] = {cid: [] for cid in cluster_ids}
    valid = set(cluster_ids)

    for b in bundles:
        chosen, warns = _select_temporal_targets(doc, b.root_id, valid, emap)
        diags.extend(warns)
        home = DCT_ID
        for kind in _MEMBERSHIP_PRIORITY:
            if kind in chosen:
                home = chosen[kind]
                break
        members[home].append(b.root_id)

    clusters = [
        TimeCluster(
            cluster_id=e.id,
            anchor_timex_id=e.id,
            anchor_label=e.surface,
            anchor=normalize_timex(e.surface, e.timex_type, doc.dct, locale_table),
            members=tuple(members[e.id]),
        )
        for e in anchorable
    ]
    clusters.append(
        TimeCluster(
            cluster_id=DCT_ID,
            anchor_timex_id=DCT_ID,
            anchor_label=doc.dct.isoformat(),
            anchor=AbsoluteAnchor.from_date(doc.dct),
            members=tuple(members[DCT_ID]),
        )
    )
    return clusters, diags


def _strongly_connected(nodes: list[str], adj: dict[str, set[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative to survive long chains."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0

    for start in nodes:
        if start in index:
            continue
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        work: list[tuple[str, "iter"]] = [(start, iter(sorted(adj.get(start, ()))))]
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(adj.get(nxt, ())))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                out.append(component)
            if work:
                parent_node = work[-1][0]
                low[parent_node] = min(low[parent_node], low[node])
    return out


def cluster_precedence(
    clusters: list[TimeCluster], doc: AnnotatedDocument
) -> tuple[set[tuple[str, str]], list, list[Diagnostic]]:
    """Precedence edges between clusters after cycle resolution.

    Edges come from pairwise anchor comparison (strictly-before only) and
    from explicit before/after relations between time expressions.  Anchor
    edges alone can never cycle, so every cycle contains an explicit edge;
    the one whose source appears latest in the document is dropped (with a
    warning) until the graph is acyclic.
    """
    emap = doc.entity_map()
    ids = [c.cluster_id for c in clusters]
    idset = set(ids)
    pos = {cid: (-1 if cid == DCT_ID else emap[cid].start) for cid in ids}

    edges: set[tuple[str, str]] = set()
    anchors = {c.cluster_id: c.anchor for c in clusters}
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            order = compare_anchors(anchors[a], anchors[b], doc.dct)
            if order is AnchorOrder.LESS:
                edges.add((a, b))
            elif order is AnchorOrder.GREATER:
                edges.add((b, a))

    explicit = []
    for r in doc.relations:
        if r.source_id not in idset or r.target_id not in idset:
            continue
        if r.kind is RelationKind.TIME_BEFORE:
            explicit.append((r.source_id, r.target_id, r))
        elif r.kind is RelationKind.TIME_AFTER:
            explicit.append((r.target_id, r.source_id, r))

    diags: list[Diagnostic] = []
    dropped = []
    while True:
        adj: dict[str, set[str]] = {}
        combined = edges | {(u, v) for u, v, _ in explicit}
        for u, v in combined:
            adj.setdefault(u, set()).add(v)
        comp_of: dict[str, int] = {}
        components = _strongly_connected(ids, adj)
        for idx, component in enumerate(components):
            for node in component:
                comp_of[node] = idx
        cyclic = {idx for idx, component in enumerate(components) if len(component) > 1}
        candidates = [
            (u, v, r)
            for u, v, r in explicit
            if u == v or (comp_of[u] == comp_of[v] and comp_of[u] in cyclic)
        ]
        if not candidates:
            break
        u, v, r = max(candidates, key=lambda t: (pos[t[2].source_id], pos[t[2].target_id], t[2].kind.value))
        explicit.remove((u, v, r))
        dropped.append(r)
        diags.append(
            _warn(
                "time-cycle",
                f"temporal relation cycle; dropping {r.kind.value} from {r.source_id!r} to {r.target_id!r}",
                pos.get(r.source_id),
            )
        )

    surviving = edges | {(u, v) for u, v, _ in explicit if u != v}
    return surviving, dropped, diags


def order_clusters(clusters: list[TimeCluster], doc: AnnotatedDocument) -> tuple[list[TimeCluster], list[Diagnostic]]:
    """Assign order indexes: a linear extension of the precedence edges.

    Ties are broken by first-mention offset (the DCT cluster counts as
    mentioned before everything), then by cluster id, so the result is
    deterministic.
    """
    edges, _dropped, diags = cluster_precedence(clusters, doc)
    emap = doc.entity_map()
    pos = {c.cluster_id: (-1 if c.cluster_id == DCT_ID else emap[c.cluster_id].start) for c in clusters}

    adj: dict[str, list[str]] = {}
    indeg = {c.cluster_id: 0 for c in clusters}
    for u, v in sorted(edges, key=lambda e: (pos[e[0]], e[0], pos[e[1]], e[1])):
        adj.setdefault(u, []).append(v)
        indeg[v] += 1

    heap = [(pos[cid], cid) for cid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        _, cid = heapq.heappop(heap)
        order.append(cid)
        for nxt in adj.get(cid, []):
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (pos[nxt], nxt))
    if len(order) != len(clusters):  # pragma: no cover - cycles are resolved above
        raise RuntimeError("precedence graph still cyclic after edge dropping")

    by_id = {c.cluster_id: c for c in clusters}
    ordered = [replace(by_id[cid], order_index=i) for i, cid in enumerate(order)]
    return ordered, diags


def infer_spans(
    doc: AnnotatedDocument, clusters: list[TimeCluster], bundles: list[EntityBundle]
) -> tuple[list[EntitySpan], list[Diagnostic]]:
    """Derive each bundle's column span from its root's temporal relations.

    Begin/end pairs beat a lone ``timeOn``; before/after relations place a
    point span one column away from their target (clamped to the timeline)
    with the matching side left open.  A bundle with no usable temporal
    relation sits at its membership cluster.
    """
    diags: list[Diagnostic] = []
    emap = doc.entity_map()
    idx = {c.cluster_id: c.order_index for c in clusters}
    member_cluster = {root: c.cluster_id for c in clusters for root in c.members}
    last = len(clusters) - 1
    spans: list[EntitySpan] = []

    for b in bundles:
        chosen, warns = _select_temporal_targets(doc, b.root_id, set(idx), emap)
        diags.extend(warns)
        begin = chosen.get(RelationKind.TIME_BEGIN)
        end = chosen.get(RelationKind.TIME_END)
        on = chosen.get(RelationKind.TIME_ON)
        before = chosen.get(RelationKind.TIME_BEFORE)
        after = chosen.get(RelationKind.TIME_AFTER)
        open_start = open_end = False
        if begin is not None and end is not None:
            lo, hi = idx[begin], idx[end]
            if lo > hi:
                diags.append(
                    _warn(
                        "span-inverted",
                        f"span of {b.root_id!r} begins after it ends; collapsed to the begin cluster",
                        emap[b.root_id].start,
                    )
                )
                hi = lo
        elif begin is not None:
            lo, hi, open_end = idx[begin], last, True
        elif end is not None:
            lo = hi = idx[end]
            open_start = True
        elif on is not None:
            lo = hi = idx[on]
        elif before is not None:
            lo = hi = max(idx[before] - 1, 0)
            open_start = True
        elif after is not None:
            lo = hi = min(idx[after] + 1, last)
            open_end = True
        else:
            lo = hi = idx[member_cluster[b.root_id]]
        spans.append(EntitySpan(b.root_id, lo, hi, open_start, open_end))
    return spans, diags


def build_timeline(doc: AnnotatedDocument, locale_table: LocaleTable | None = None) -> Timeline:
    """Run the full inference pipeline on a valid document."""
    vdiags = validate_document(doc)
    if any(d.severity is Severity.ERROR for d in vdiags):
        raise DocumentError(vdiags)
    bundles, d1 = bundle_entities(doc)
    clusters, d2 = build_clusters(doc, bundles, locale_table)
    ordered, d3 = order_clusters(clusters, doc)
    spans, d4 = infer_spans(doc, ordered, bundles)
    diagnostics = dedupe_diagnostics([*vdiags, *d1, *d2, *d3, *d4])
    # The stage functions keep going past errors so every problem is
    # reported at once, but an Error anywhere still rejects the document.
    if any(d.severity is Severity.ERROR for d in diagnostics):
        raise DocumentError(list(diagnostics))
    return Timeline(
        doc_id=doc.doc_id,
        dct=doc.dct,
        clusters=tuple(ordered),
        bundles=tuple(bundles),
        spans=tuple(spans),
        diagnostics=diagnostics,
    )

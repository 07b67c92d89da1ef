"""Quality harness: surface overlap, structural similarity, placement scoring.

Three complementary measurements:

* :func:`bigram_overlap` — how much two texts share on the surface
  (Jaccard over word-bigram sets).
* :func:`timeline_similarity` — how similar two inferred timelines are
  structurally, independent of wording.
* :func:`placement_accuracy` — per-bundle OnSet / Duration / ChangeInfo
  verdicts against a hand-authored gold placement file, aggregated into
  the familiar ``correct/total (percent)`` presentation.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .model import Diagnostic, Severity
from .timeline import Timeline

GOLD_SCHEMA = "heart-gold/1"


# --------------------------------------------------------------------------
# Surface overlap
# --------------------------------------------------------------------------

def _word_bigrams(text: str) -> tuple[set[tuple[str, str]], int]:
    tokens = re.findall(r"\w+", text.lower())
    return set(zip(tokens, tokens[1:])), len(tokens)


def bigram_overlap(text_a: str, text_b: str) -> float:
    """Jaccard similarity of the word-bigram sets of two texts.

    Texts with fewer than two tokens have no bigrams; the overlap is
    reported as 0.0 with a warning rather than raising.
    """
    bigrams_a, n_a = _word_bigrams(text_a)
    bigrams_b, n_b = _word_bigrams(text_b)
    if n_a < 2 or n_b < 2:
        warnings.warn("bigram overlap is 0 for texts with fewer than two tokens", stacklevel=2)
        return 0.0
    union = bigrams_a | bigrams_b
    return len(bigrams_a & bigrams_b) / len(union)


# --------------------------------------------------------------------------
# Structural similarity
# --------------------------------------------------------------------------

def _timeline_signature(timeline: Timeline) -> list[tuple[float, str, str]]:
    """Each bundle as (relative position of its begin cluster, kind, qualifier)."""
    denom = max(len(timeline.clusters) - 1, 1)
    begin_of = {s.bundle_root_id: s.begin_cluster for s in timeline.spans}
    items = [
        (begin_of.get(b.root_id, 0) / denom, b.root_kind.value, b.root_qualifier or "")
        for b in timeline.bundles
    ]
    items.sort()
    return items


def timeline_similarity(timeline_a: Timeline, timeline_b: Timeline, *, tolerance: float = 0.25) -> float:
    """F1 over greedily matched bundles of two timelines.

    Two bundles match when their entity kinds and certainty/state
    qualifiers agree and their relative chronological positions differ by
    at most ``tolerance``.  Candidate pairs are taken closest-first with a
    symmetric tie-break, so sim(A, B) == sim(B, A).
    """
    items_a = _timeline_signature(timeline_a)
    items_b = _timeline_signature(timeline_b)
    if not items_a and not items_b:
        return 1.0
    if not items_a or not items_b:
        return 0.0
    pairs = []
    for i, (pa, ka, qa) in enumerate(items_a):
        for j, (pb, kb, qb) in enumerate(items_b):
            if ka != kb or qa != qb:
                continue
            diff = abs(pa - pb)
            if diff <= tolerance:
                pairs.append((diff, min(pa, pb), max(pa, pb), ka, qa, min(i, j), max(i, j), i, j))
    pairs.sort(key=lambda p: p[:7])
    used_a: set[int] = set()
    used_b: set[int] = set()
    matches = 0
    for p in pairs:
        i, j = p[7], p[8]
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matches += 1
    return 2 * matches / (len(items_a) + len(items_b))


# --------------------------------------------------------------------------
# Placement accuracy
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldEntry:
    """Expected placement for one bundle, keyed by its root surface+offset."""

    surface: str
    start: int
    onset: str | None = None
    duration: tuple[str, str] | None = None
    change_info: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class GoldPlacement:
    doc_id: str
    entries: tuple[GoldEntry, ...] = ()

    @staticmethod
    def from_json(data: dict) -> "GoldPlacement":
        if data.get("schema") != GOLD_SCHEMA:
            raise ValueError(f"unsupported gold schema: {data.get('schema')!r}")
        entries = []
        for e in data["entries"]:
            duration = e.get("duration")
            entries.append(
                GoldEntry(
                    surface=e["surface"],
                    start=e["start"],
                    onset=e.get("onset"),
                    duration=tuple(duration) if duration else None,
                    change_info=tuple((c[0], c[1]) for c in e.get("changeInfo", [])),
                )
            )
        return GoldPlacement(doc_id=data["docId"], entries=tuple(entries))

    def to_json_dict(self) -> dict:
        return {
            "schema": GOLD_SCHEMA,
            "docId": self.doc_id,
            "entries": [
                {
                    "surface": e.surface,
                    "start": e.start,
                    "onset": e.onset,
                    "duration": list(e.duration) if e.duration else None,
                    "changeInfo": [list(c) for c in e.change_info],
                }
                for e in self.entries
            ],
        }


def format_ratio(correct: int, total: int) -> str:
    """``18/20 (90.0%)`` presentation; ``---`` when nothing was assessed."""
    if total == 0:
        return "---"
    if correct == total:
        return f"{correct}/{total} (100%)"
    return f"{correct}/{total} ({100 * correct / total:.1f}%)"


@dataclass(frozen=True)
class AccuracyReport:
    doc_id: str
    onset: tuple[int, int] = (0, 0)
    duration: tuple[int, int] = (0, 0)
    change_info: tuple[int, int] = (0, 0)
    verdicts: tuple[dict, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "docId": self.doc_id,
            "onset": {"correct": self.onset[0], "total": self.onset[1], "display": format_ratio(*self.onset)},
            "duration": {"correct": self.duration[0], "total": self.duration[1], "display": format_ratio(*self.duration)},
            "changeInfo": {"correct": self.change_info[0], "total": self.change_info[1], "display": format_ratio(*self.change_info)},
            "verdicts": list(self.verdicts),
            "diagnostics": [d.to_json_dict() for d in self.diagnostics],
        }


def placement_accuracy(timeline: Timeline, gold: GoldPlacement) -> AccuracyReport:
    """Score a timeline against expected placements.

    Each gold entry names a bundle by (surface, start).  OnSet compares
    the anchor label of the bundle's begin cluster; Duration compares the
    (begin, end) anchor-label pair; ChangeInfo compares the exact set of
    (change surface, reference surface) pairs — scored only when the gold
    or the timeline has change notes for the bundle.  A gold entry whose
    bundle is missing counts every aspect it specifies as incorrect.
    """
    label_of = {c.order_index: c.anchor_label for c in timeline.clusters}
    bundle_by_key = {(b.root_surface, b.root_start): b for b in timeline.bundles}
    begin_end = {s.bundle_root_id: (s.begin_cluster, s.end_cluster) for s in timeline.spans}

    onset = [0, 0]
    duration = [0, 0]
    change_info = [0, 0]
    verdicts: list[dict] = []
    diags: list[Diagnostic] = []

    for entry in gold.entries:
        verdict: dict = {"surface": entry.surface, "start": entry.start}
        bundle = bundle_by_key.get((entry.surface, entry.start))
        if bundle is None:
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "gold-unmatched",
                    f"no bundle with surface {entry.surface!r} at offset {entry.start}",
                    entry.start,
                )
            )
            if entry.onset is not None:
                onset[1] += 1
                verdict["onset"] = "incorrect"
            if entry.duration is not None:
                duration[1] += 1
                verdict["duration"] = "incorrect"
            if entry.change_info:
                change_info[1] += 1
                verdict["changeInfo"] = "incorrect"
            verdicts.append(verdict)
            continue

        begin, end = begin_end[bundle.root_id]
        if entry.onset is not None:
            onset[1] += 1
            ok = label_of.get(begin) == entry.onset
            onset[0] += ok
            verdict["onset"] = "correct" if ok else "incorrect"
        if entry.duration is not None:
            duration[1] += 1
            ok = (label_of.get(begin), label_of.get(end)) == entry.duration
            duration[0] += ok
            verdict["duration"] = "correct" if ok else "incorrect"
        predicted_changes = {(ch.change_surface, ch.ref_surface or "") for ch in bundle.changes}
        if entry.change_info or predicted_changes:
            change_info[1] += 1
            ok = predicted_changes == set(entry.change_info)
            change_info[0] += ok
            verdict["changeInfo"] = "correct" if ok else "incorrect"
        verdicts.append(verdict)

    return AccuracyReport(
        doc_id=gold.doc_id,
        onset=(onset[0], onset[1]),
        duration=(duration[0], duration[1]),
        change_info=(change_info[0], change_info[1]),
        verdicts=tuple(verdicts),
        diagnostics=tuple(diags),
    )


def format_report_table(rows: list[tuple[str, AccuracyReport]]) -> str:
    """Plain-text accuracy table: one row per document, one column per aspect."""
    header = ["", "OnSet", "Duration", "ChangeInfo"]
    body = [
        [label, format_ratio(*r.onset), format_ratio(*r.duration), format_ratio(*r.change_info)]
        for label, r in rows
    ]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(4)]
    lines = []
    for line in [header] + body:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip())
    return "\n".join(lines) + "\n"

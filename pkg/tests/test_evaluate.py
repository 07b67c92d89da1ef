"""Quality harness: bigram overlap, timeline similarity, placement scoring."""

import random

import pytest

from heart.evaluate import (
    GOLD_SCHEMA,
    AccuracyReport,
    GoldEntry,
    GoldPlacement,
    bigram_overlap,
    format_ratio,
    format_report_table,
    placement_accuracy,
    timeline_similarity,
)
from heart.timeline import build_timeline
from heart.wire import parse_document

from genutil import random_document


def timeline_of(body: str, dct: str = "2021-04-10"):
    doc = parse_document(f'<doc id="t" dct="{dct}">{body}</doc>')
    return build_timeline(doc), doc


class TestBigramOverlap:
    def test_identical_texts(self):
        assert bigram_overlap("fever persisted for days", "fever persisted for days") == 1.0

    def test_known_partial_overlap(self):
        # bigrams {ab, bc} vs {ab, bd}: intersection 1, union 3
        assert bigram_overlap("a b c", "a b d") == pytest.approx(1 / 3)

    def test_case_and_punctuation_insensitive(self):
        assert bigram_overlap("Fever, persisted!", "fever persisted") == 1.0

    def test_disjoint_texts(self):
        assert bigram_overlap("alpha beta gamma", "delta epsilon zeta") == 0.0

    def test_short_text_warns_and_scores_zero(self):
        with pytest.warns(UserWarning):
            assert bigram_overlap("fever", "fever persisted") == 0.0


class TestTimelineSimilarity:
    def test_identical_timelines(self):
        tl, _ = timeline_of('<d id="d1">fever</d> <t-key id="k1">CT</t-key>')
        assert timeline_similarity(tl, tl) == 1.0

    def test_symmetric(self):
        rng = random.Random(61)
        for i in range(25):
            a = build_timeline(random_document(rng, doc_id=f"a{i}"))
            b = build_timeline(random_document(rng, doc_id=f"b{i}"))
            ab = timeline_similarity(a, b)
            ba = timeline_similarity(b, a)
            assert ab == ba, f"pair {i}"
            assert 0.0 <= ab <= 1.0

    def test_disjoint_kinds_score_zero(self):
        a, _ = timeline_of('<d id="d1">fever</d>')
        b, _ = timeline_of('<t-key id="k1">CT</t-key>')
        assert timeline_similarity(a, b) == 0.0

    def test_qualifier_must_agree(self):
        a, _ = timeline_of('<d id="d1" certainty="positive">fever</d>')
        b, _ = timeline_of('<d id="d1" certainty="negative">fever</d>')
        assert timeline_similarity(a, b) == 0.0

    def test_both_empty(self):
        a, _ = timeline_of("no annotations here")
        b, _ = timeline_of("still nothing")
        assert timeline_similarity(a, b) == 1.0

    def test_one_empty(self):
        a, _ = timeline_of("no annotations here")
        b, _ = timeline_of('<d id="d1">fever</d>')
        assert timeline_similarity(a, b) == 0.0

    def test_position_outside_tolerance_blocks_match(self):
        # Five columns; disease at the first column vs at the last: diff 1.0 > 0.25.
        early = (
            '<timex3 id="t1" type="date">April 1, 2021</timex3> <timex3 id="t2" type="date">April 2, 2021</timex3> '
            '<timex3 id="t3" type="date">April 3, 2021</timex3> <timex3 id="t4" type="date">April 4, 2021</timex3> '
        )
        a, _ = timeline_of(early + '<d id="d1" rel="timeOn:t1">fever</d>', dct="2021-04-05")
        b, _ = timeline_of(early + '<d id="d1" rel="timeOn:DCT">fever</d>', dct="2021-04-05")
        assert timeline_similarity(a, b) == 0.0
        assert timeline_similarity(a, b, tolerance=1.0) > 0.0

    def test_wording_changes_do_not_matter(self):
        a, _ = timeline_of('<timex3 id="t1" type="date">April 3, 2021</timex3> <d id="d1" rel="timeOn:t1">pyrexia</d>')
        b, _ = timeline_of('<timex3 id="t9" type="date">April 3, 2021</timex3> <d id="d7" rel="timeOn:t9">fever</d>')
        assert timeline_similarity(a, b) == 1.0


GOLD_BODY = (
    'Fever began <timex3 id="t1" type="date">April 3, 2021</timex3> and resolved '
    '<timex3 id="t2" type="date">April 9, 2021</timex3>. '
    '<d id="d1" rel="timeBegin:t1;timeEnd:t2">fever</d> was noted. '
    'A <d id="d2">mass</d> appeared <c id="c1" rel="changeSbj:d2;changeRef:d3">enlarged</c> '
    'versus the prior <d id="d3">nodule</d>.'
)


def gold_for(doc, overrides=None):
    """Gold entries derived from the parsed offsets so tests stay robust."""
    start = {e.id: e.start for e in doc.entities}
    entries = [
        GoldEntry("fever", start["d1"], onset="April 3, 2021", duration=("April 3, 2021", "April 9, 2021")),
        GoldEntry("mass", start["d2"], change_info=(("enlarged", "nodule"),)),
        GoldEntry("nodule", start["d3"], onset="2021-04-10"),
    ]
    for idx, entry in (overrides or {}).items():
        entries[idx] = entry
    return GoldPlacement(doc_id="t", entries=tuple(entries))


class TestPlacementAccuracy:
    def test_all_correct(self):
        tl, doc = timeline_of(GOLD_BODY)
        report = placement_accuracy(tl, gold_for(doc))
        assert report.onset == (2, 2)
        assert report.duration == (1, 1)
        assert report.change_info == (1, 1)
        assert report.diagnostics == ()
        assert all("incorrect" not in v.values() for v in report.verdicts)

    def test_wrong_onset_counts_against(self):
        tl, doc = timeline_of(GOLD_BODY)
        start = {e.id: e.start for e in doc.entities}
        gold = gold_for(doc, {2: GoldEntry("nodule", start["d3"], onset="April 9, 2021")})
        report = placement_accuracy(tl, gold)
        assert report.onset == (1, 2)

    def test_duration_needs_both_ends(self):
        tl, doc = timeline_of(GOLD_BODY)
        start = {e.id: e.start for e in doc.entities}
        wrong = GoldEntry("fever", start["d1"], onset="April 3, 2021", duration=("April 3, 2021", "2021-04-10"))
        report = placement_accuracy(tl, gold_for(doc, {0: wrong}))
        assert report.onset == (2, 2)
        assert report.duration == (0, 1)

    def test_change_info_is_set_equality(self):
        tl, doc = timeline_of(GOLD_BODY)
        start = {e.id: e.start for e in doc.entities}
        wrong = GoldEntry("mass", start["d2"], change_info=(("enlarged", "cyst"),))
        report = placement_accuracy(tl, gold_for(doc, {1: wrong}))
        assert report.change_info == (0, 1)

    def test_unlisted_predicted_changes_still_scored(self):
        # Gold says nothing about d2's changes, but the timeline has one: scored, incorrect.
        tl, doc = timeline_of(GOLD_BODY)
        start = {e.id: e.start for e in doc.entities}
        silent = GoldEntry("mass", start["d2"], onset="2021-04-10")
        report = placement_accuracy(tl, gold_for(doc, {1: silent}))
        assert report.change_info == (0, 1)

    def test_missing_ref_scored_as_empty_string(self):
        tl, doc = timeline_of(
            'A <d id="d2">mass</d> appeared <c id="c1" rel="changeSbj:d2">enlarged</c>.'
        )
        start = {e.id: e.start for e in doc.entities}
        gold = GoldPlacement("t", (GoldEntry("mass", start["d2"], change_info=(("enlarged", ""),)),))
        assert placement_accuracy(tl, gold).change_info == (1, 1)

    def test_unmatched_gold_entry(self):
        tl, doc = timeline_of(GOLD_BODY)
        gold = GoldPlacement("t", (GoldEntry("phantom", 0, onset="2021-04-10", duration=("a", "b")),))
        report = placement_accuracy(tl, gold)
        assert report.onset == (0, 1)
        assert report.duration == (0, 1)
        assert report.change_info == (0, 0)
        assert [d.code for d in report.diagnostics] == ["gold-unmatched"]

    def test_perturbing_one_entry_drops_exactly_one(self):
        tl, doc = timeline_of(GOLD_BODY)
        base = placement_accuracy(tl, gold_for(doc))
        total = base.onset[0] + base.duration[0] + base.change_info[0]
        start = {e.id: e.start for e in doc.entities}
        wrong = gold_for(doc, {2: GoldEntry("nodule", start["d3"], onset="never")})
        perturbed = placement_accuracy(tl, wrong)
        got = perturbed.onset[0] + perturbed.duration[0] + perturbed.change_info[0]
        assert got == total - 1


class TestGoldSerialization:
    def test_round_trip(self):
        gold = GoldPlacement(
            "doc-1",
            (
                GoldEntry("fever", 12, onset="April 3, 2021", duration=("a", "b"), change_info=(("x", "y"),)),
                GoldEntry("mass", 40),
            ),
        )
        assert GoldPlacement.from_json(gold.to_json_dict()) == gold

    def test_schema_tag_enforced(self):
        with pytest.raises(ValueError, match="schema"):
            GoldPlacement.from_json({"schema": "other/9", "docId": "x", "entries": []})

    def test_schema_constant(self):
        assert GOLD_SCHEMA == "heart-gold/1"


class TestFormatting:
    @pytest.mark.parametrize(
        ("correct", "total", "display"),
        [
            (0, 0, "---"),
            (18, 20, "18/20 (90.0%)"),
            (15, 15, "15/15 (100%)"),
            (1, 2, "1/2 (50.0%)"),
            (15, 17, "15/17 (88.2%)"),
        ],
    )
    def test_ratio_display(self, correct, total, display):
        assert format_ratio(correct, total) == display

    def test_report_json_shape(self):
        report = AccuracyReport("d", onset=(18, 20), duration=(15, 15), change_info=(0, 0))
        data = report.to_json_dict()
        assert data["docId"] == "d"
        assert data["onset"] == {"correct": 18, "total": 20, "display": "18/20 (90.0%)"}
        assert data["duration"]["display"] == "15/15 (100%)"
        assert data["changeInfo"]["display"] == "---"

    def test_table_alignment(self):
        rows = [
            ("Case report", AccuracyReport("a", onset=(18, 20), duration=(18, 20), change_info=(0, 0))),
            ("Radiology report", AccuracyReport("b", onset=(15, 17), duration=(15, 15), change_info=(1, 2))),
        ]
        text = format_report_table(rows)
        header, first, second = text.splitlines()
        assert header.split() == ["OnSet", "Duration", "ChangeInfo"]
        assert "18/20 (90.0%)" in first and first.strip().startswith("Case report")
        assert "---" in first
        assert "15/17 (88.2%)" in second and "1/2 (50.0%)" in second
        assert header.index("OnSet") == first.index("18/20")
        assert first.index("18/20") == second.index("15/17")
        assert text.endswith("\n")

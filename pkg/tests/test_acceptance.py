"""Acceptance gate: every shipping criterion, one pass/fail line each.

Each test prints ``[PASS]``/``[FAIL] <criterion>: <metrics>`` to the real
stderr (capture suspended via capsys) so a plain ``pytest -v`` run shows
the verdict per criterion, then asserts.
"""

import datetime as dt
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from heart.cli import main as cli_main
from heart.evaluate import GoldPlacement, bigram_overlap, format_ratio, placement_accuracy, timeline_similarity
from heart.layout import assign_rows, build_layout
from heart.pipeline import process_document, view_json
from heart.service import create_app
from heart.temporal import default_locale_table, normalize_timex, resolve_anchor
from heart.timeline import build_clusters, build_timeline, bundle_entities, cluster_precedence
from heart.model import TimexType
from heart.wire import parse_document, serialize_document

from genutil import expected_row_oracle, random_document, relative_date_oracle, valid_orderings

ROOT = Path(__file__).resolve().parent.parent
CORPUS = sorted((ROOT / "fixtures" / "corpus").glob("*.xml"))
GOLD_DIR = ROOT / "fixtures" / "gold"
GOLDEN_DIR = ROOT / "fixtures" / "golden"
INVALID = sorted((ROOT / "fixtures" / "invalid").glob("*.xml"))
SCHEMA_DIR = ROOT / "docs" / "schemas"


def _criterion(capsys, name: str, violations: list, detail: str) -> None:
    ok = not violations
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    if violations:
        line += f" | first violation: {violations[0]}"
    with capsys.disabled():
        print(line, file=sys.stderr, flush=True)
    assert ok, line


@pytest.fixture(scope="module")
def corpus_texts():
    assert len(CORPUS) >= 10
    return {p.stem: p.read_text(encoding="utf-8") for p in CORPUS}


def test_round_trip(corpus_texts, capsys):
    violations = []
    started = time.perf_counter()
    for stem, text in corpus_texts.items():
        first = parse_document(text)
        again = parse_document(serialize_document(first))
        if again != first:
            violations.append(f"corpus {stem}")
    rng = random.Random(73)
    for i in range(1000):
        doc = random_document(rng, doc_id=f"rt{i}")
        if parse_document(serialize_document(doc)) != doc:
            violations.append(f"random rt{i}")
    elapsed = time.perf_counter() - started
    if elapsed >= 5.0:
        violations.append(f"took {elapsed:.2f}s")
    _criterion(
        capsys,
        "round-trip",
        violations,
        f"{len(corpus_texts)} corpus + 1000 random documents in {elapsed:.2f}s (< 5s)",
    )


def test_linear_extension_oracle(corpus_texts, capsys):
    violations = []
    checked = 0
    for stem, text in corpus_texts.items():
        doc = parse_document(text)
        bundles, _ = bundle_entities(doc)
        clusters, _ = build_clusters(doc, bundles)
        if len(clusters) > 8:
            continue
        edges, _, _ = cluster_precedence(clusters, doc)
        valid = valid_orderings([c.cluster_id for c in clusters], edges)
        timeline = build_timeline(doc)
        produced = tuple(c.cluster_id for c in sorted(timeline.clusters, key=lambda c: c.order_index))
        checked += 1
        if produced not in valid:
            violations.append(f"{stem}: {produced} not among {len(valid)} valid orderings")
    if checked < len(corpus_texts):
        violations.append(f"only {checked} fixtures had <= 8 clusters")
    _criterion(
        capsys,
        "linear-extension-oracle",
        violations,
        f"{checked} fixtures brute-force checked, every produced order is a valid linear extension",
    )


def test_calendar_oracle(capsys):
    table = default_locale_table()
    dcts = [
        dt.date(2020, 2, 29),
        dt.date(2020, 12, 31),
        dt.date(2021, 1, 1),
        dt.date(2021, 1, 31),
        dt.date(2021, 3, 1),
        dt.date(2023, 12, 15),
        dt.date(2024, 2, 29),
    ]
    cases = []
    for dct in dcts:
        for unit in ("day", "week", "month", "year"):
            for amount in (1, 2, 3, 5, 11):
                cases.append((dct, f"{amount} {unit}s ago" if amount != 1 else f"1 {unit} ago", amount, unit, -1))
                cases.append((dct, f"{amount} {unit}s later" if amount != 1 else f"1 {unit} later", amount, unit, +1))
    cases = cases[:200]
    violations = []
    for dct, surface, amount, unit, sign in cases:
        anchor = normalize_timex(surface, TimexType.DATE, dct, table)
        resolved = resolve_anchor(anchor, dct)
        expected = relative_date_oracle(dct, amount, unit, sign)
        got = resolved.iso() if resolved else None
        if got != expected.isoformat():
            violations.append(f"{surface!r} @ {dct}: {got} != {expected}")
    _criterion(capsys, "calendar-oracle", violations, f"{len(cases)} relative expressions match calendar arithmetic exactly")


def _lane_violations(layout) -> list[str]:
    cells: dict[tuple[str, int], list[tuple[int, int]]] = {}
    for b in layout.bars:
        cells.setdefault((b.row_id, b.lane), []).append((b.start_col, b.end_col))
    for t in layout.tables:
        for i in range(len(t.entries)):
            cells.setdefault((t.row_id, t.lane + i), []).append((t.anchor_col, t.anchor_col))
    out = []
    for (row, lane), intervals in cells.items():
        intervals.sort()
        for (s1, e1), (s2, e2) in zip(intervals, intervals[1:]):
            if e1 >= s2:
                out.append(f"row {row} lane {lane}: ({s1},{e1}) overlaps ({s2},{e2})")
    return out


def test_layout_conformance(capsys):
    rng = random.Random(97)
    violations = []
    for i in range(500):
        doc = random_document(rng, doc_id=f"layout{i}")
        timeline = build_timeline(doc)
        layout = build_layout(timeline, doc)
        for v in _lane_violations(layout):
            violations.append(f"doc{i}: {v}")
        entries = sum(len(t.entries) for t in layout.tables)
        if len(layout.bars) + entries != len(timeline.bundles):
            violations.append(f"doc{i}: conservation {len(layout.bars)}+{entries} != {len(timeline.bundles)}")
        _, placement = assign_rows(timeline, doc)
        emap = doc.entity_map()
        for b in timeline.bundles:
            _, want_row = expected_row_oracle(emap[b.root_id])
            if placement[b.root_id] != want_row:
                violations.append(f"doc{i}: {b.root_id} in {placement[b.root_id]!r}, expected {want_row!r}")
        if violations:
            break
    _criterion(
        capsys,
        "layout-conformance",
        violations,
        "500 random timelines: lanes disjoint, bars+tables == bundles, row rules re-derived",
    )


def test_render_determinism(corpus_texts, capsys):
    runner = CliRunner()
    violations = []
    for stem in corpus_texts:
        path = str(ROOT / "fixtures" / "corpus" / f"{stem}.xml")
        svgs = {runner.invoke(cli_main, ["render", path]).stdout for _ in range(3)}
        if len(svgs) != 1:
            violations.append(f"{stem}: SVG differs across runs")
            continue
        golden_svg = (GOLDEN_DIR / f"{stem}.svg").read_text(encoding="utf-8")
        if svgs.pop() != golden_svg:
            violations.append(f"{stem}: SVG differs from frozen golden")
        views = {runner.invoke(cli_main, ["render", path, "--format", "json"]).stdout for _ in range(3)}
        golden_view = (GOLDEN_DIR / f"{stem}.view.json").read_text(encoding="utf-8")
        if len(views) != 1 or views.pop() != golden_view:
            violations.append(f"{stem}: view JSON differs")
    timeline_golden = GOLDEN_DIR / f"{CORPUS[0].stem}.timeline.json"
    produced = CliRunner().invoke(cli_main, ["timeline", str(CORPUS[0])]).stdout
    if produced != timeline_golden.read_text(encoding="utf-8"):
        violations.append(f"{CORPUS[0].stem}: timeline JSON differs from frozen golden")
    _criterion(
        capsys,
        "render-determinism",
        violations,
        f"{len(corpus_texts)} fixtures byte-identical across 3 runs and equal to frozen goldens",
    )


def test_precision_harness(corpus_texts, capsys):
    violations = []
    perturbed_checks = 0
    for stem, text in corpus_texts.items():
        timeline = build_timeline(parse_document(text))
        gold = GoldPlacement.from_json(json.loads((GOLD_DIR / f"{stem}.json").read_text(encoding="utf-8")))
        report = placement_accuracy(timeline, gold)
        for aspect, (correct, total) in (
            ("onset", report.onset),
            ("duration", report.duration),
            ("changeInfo", report.change_info),
        ):
            if correct != total:
                violations.append(f"{stem}: {aspect} {correct}/{total}")
        # Perturb exactly one onset entry: the report must drop exactly one.
        entries = list(gold.entries)
        target = next((k for k, e in enumerate(entries) if e.onset is not None), None)
        if target is None:
            continue
        import dataclasses

        entries[target] = dataclasses.replace(entries[target], onset="__wrong__")
        perturbed = placement_accuracy(timeline, GoldPlacement(gold.doc_id, tuple(entries)))
        n = report.onset[1]
        if perturbed.onset != (n - 1, n):
            violations.append(f"{stem}: perturbed onset {perturbed.onset} != ({n - 1}, {n})")
        display = format_ratio(*perturbed.onset)
        if n > 1 and not display.endswith("%)"):
            violations.append(f"{stem}: display {display!r} not ratio-styled")
        perturbed_checks += 1
    _criterion(
        capsys,
        "precision-harness",
        violations,
        f"{len(corpus_texts)} documents score 100%; {perturbed_checks} one-entry perturbations each drop exactly 1/n",
    )


def test_coherence_harness(corpus_texts, capsys):
    doc_a = parse_document(corpus_texts["doc06_comparable_a"])
    doc_b = parse_document(corpus_texts["doc07_comparable_b"])
    overlap = bigram_overlap(doc_a.text, doc_b.text)
    similarity = timeline_similarity(build_timeline(doc_a), build_timeline(doc_b))
    violations = []
    if overlap >= 0.3:
        violations.append(f"bigram overlap {overlap:.3f} >= 0.3")
    if similarity < 0.8:
        violations.append(f"timeline similarity {similarity:.3f} < 0.8")
    _criterion(
        capsys,
        "coherence-harness",
        violations,
        f"bigram overlap {overlap:.3f} < 0.3, timeline similarity {similarity:.3f} >= 0.8",
    )


def test_service_contract(corpus_texts, capsys):
    schemas = {p.name: json.loads(p.read_text(encoding="utf-8")) for p in SCHEMA_DIR.glob("*.schema.json")}
    registry = Registry().with_resources((n, Resource.from_contents(s)) for n, s in schemas.items())
    validator = Draft202012Validator(schemas["heart-view.schema.json"], registry=registry)

    client = TestClient(create_app(), raise_server_exceptions=False)
    runner = CliRunner()
    violations = []
    for stem, text in corpus_texts.items():
        response = client.post("/api/timeline", content=text.encode("utf-8"))
        if response.status_code != 200:
            violations.append(f"{stem}: HTTP {response.status_code}")
            continue
        errors = list(validator.iter_errors(response.json()))
        if errors:
            violations.append(f"{stem}: schema error {errors[0].message[:80]}")
        cli_out = runner.invoke(cli_main, ["render", str(ROOT / "fixtures" / "corpus" / f"{stem}.xml"), "--format", "json"]).stdout
        if response.text != cli_out:
            violations.append(f"{stem}: HTTP body differs from CLI output")
    for path in INVALID:
        response = client.post("/api/timeline", content=path.read_bytes())
        if response.status_code != 400 or "diagnostics" not in response.json():
            violations.append(f"{path.stem}: expected 400 with diagnostics, got {response.status_code}")
    fever = corpus_texts["doc01_discharge_fever"].encode("utf-8")
    with ThreadPoolExecutor(max_workers=16) as pool:
        bodies = set(pool.map(lambda _: client.post("/api/timeline", content=fever).text, range(100)))
    if len(bodies) != 1:
        violations.append(f"concurrent requests produced {len(bodies)} distinct bodies")
    _criterion(
        capsys,
        "service-contract",
        violations,
        f"{len(corpus_texts)} fixtures 200+schema-valid+CLI-equal, {len(INVALID)} invalid 400, 100 concurrent identical",
    )

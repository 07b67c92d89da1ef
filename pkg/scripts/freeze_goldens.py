#!/usr/bin/env python3
"""Regenerate the frozen render outputs under fixtures/golden/.

For every document in fixtures/corpus/ this writes the SVG render and the
view JSON, plus the bare timeline JSON for the first document.  The frozen
files are compared byte-for-byte by the determinism tests; regenerate them
only after an intentional rendering change, and review the diff.

Usage: python3 scripts/freeze_goldens.py
"""

from pathlib import Path

from heart.pipeline import process_document, svg_text, timeline_json, view_json

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "fixtures" / "corpus"
GOLDEN = ROOT / "fixtures" / "golden"


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for path in sorted(CORPUS.glob("*.xml")):
        result = process_document(path.read_text(encoding="utf-8"))
        (GOLDEN / f"{path.stem}.svg").write_text(svg_text(result), encoding="utf-8")
        (GOLDEN / f"{path.stem}.view.json").write_text(view_json(result), encoding="utf-8")
        print(f"froze {path.stem}")
    first = sorted(CORPUS.glob("*.xml"))[0]
    result = process_document(first.read_text(encoding="utf-8"))
    (GOLDEN / f"{first.stem}.timeline.json").write_text(timeline_json(result), encoding="utf-8")
    print(f"froze {first.stem}.timeline.json")


if __name__ == "__main__":
    main()

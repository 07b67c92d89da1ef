"""Command-line interface.

Thin client over the same pipeline the HTTP service uses, so ``heart
render`` and ``POST /api/render`` produce byte-identical output for the
same input and settings.

Exit codes: 0 success, 1 document errors (diagnostics on stderr as JSON
lines), 2 usage errors.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from .evaluate import (
    GoldPlacement,
    bigram_overlap,
    format_report_table,
    placement_accuracy,
    timeline_similarity,
)
from .layout import LayoutConfig
from .model import DocumentError
from .pipeline import (
    PipelineResult,
    canonical_xml,
    process_document,
    svg_text,
    timeline_json,
    view_json,
)
from .temporal import LocaleTable, locale_table_from_env
from .view import canonical_json


def _parse_dct(_ctx, _param, value: str | None) -> dt.date | None:
    if value is None:
        return None
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"expected an ISO date (YYYY-MM-DD), got {value!r}")


def _load_locale(path: str | None) -> LocaleTable:
    return LocaleTable.from_path(path) if path else locale_table_from_env()


def _emit_diagnostics(diagnostics) -> None:
    for d in diagnostics:
        click.echo(json.dumps(d.to_json_dict(), ensure_ascii=False), err=True)


def _process(source: Path, dct: dt.date | None, locale_table_path: str | None, layout_config: LayoutConfig | None = None) -> PipelineResult:
    xml_text = source.read_text(encoding="utf-8")
    try:
        result = process_document(
            xml_text,
            dct=dct,
            locale_table=_load_locale(locale_table_path),
            layout_config=layout_config,
        )
    except DocumentError as exc:
        _emit_diagnostics(exc.diagnostics)
        sys.exit(1)
    _emit_diagnostics(result.timeline.diagnostics)
    return result


def _write(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")


_source_argument = click.argument("source", type=click.Path(exists=True, dir_okay=False, path_type=Path))
_output_option = click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), help="write to a file instead of stdout")
_dct_option = click.option("--dct", callback=_parse_dct, help="override the document creation time (ISO date)")
_locale_option = click.option("--locale-table", type=click.Path(exists=True, dir_okay=False), help="custom time-expression pattern table")


@click.group()
@click.version_option(package_name="heart-timeliner", prog_name="heart")
def main() -> None:
    """Turn annotated clinical documents into chronological timelines."""


@main.command()
@_source_argument
@_output_option
@_dct_option
def parse(source: Path, output: Path | None, dct: dt.date | None) -> None:
    """Validate a document and emit its canonical XML."""
    result = _process(source, dct, None)
    _write(canonical_xml(result), output)


@main.command()
@_source_argument
@_output_option
@_dct_option
@_locale_option
def timeline(source: Path, output: Path | None, dct: dt.date | None, locale_table: str | None) -> None:
    """Infer the timeline and emit it as JSON."""
    result = _process(source, dct, locale_table)
    _write(timeline_json(result), output)


@main.command()
@_source_argument
@_output_option
@_dct_option
@_locale_option
@click.option("--spacing", type=click.Choice(["ordinal", "proportional"]), default="ordinal", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["svg", "json"]), default="svg", show_default=True, help="svg drawing or full view JSON")
@click.option("--show-empty-dct", is_flag=True, help="keep the document-date column even when nothing sits on it")
def render(
    source: Path,
    output: Path | None,
    dct: dt.date | None,
    locale_table: str | None,
    spacing: str,
    fmt: str,
    show_empty_dct: bool,
) -> None:
    """Render the document as an SVG timeline (or view JSON)."""
    config = LayoutConfig(spacing=spacing, show_empty_dct=show_empty_dct)
    result = _process(source, dct, locale_table, config)
    _write(svg_text(result) if fmt == "svg" else view_json(result), output)


@main.command()
@_source_argument
@click.argument("gold", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_output_option
@_dct_option
@_locale_option
@click.option("--label", default=None, help="row label for the table output")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
def score(
    source: Path,
    gold: Path,
    output: Path | None,
    dct: dt.date | None,
    locale_table: str | None,
    label: str | None,
    fmt: str,
) -> None:
    """Score a document's timeline against a gold placement file."""
    result = _process(source, dct, locale_table)
    gold_data = json.loads(gold.read_text(encoding="utf-8"))
    try:
        placement = GoldPlacement.from_json(gold_data)
    except (KeyError, ValueError) as exc:
        raise click.UsageError(f"invalid gold file {gold}: {exc}")
    report = placement_accuracy(result.timeline, placement)
    if fmt == "json":
        _write(canonical_json(report.to_json_dict()), output)
    else:
        _write(format_report_table([(label or placement.doc_id, report)]), output)


@main.command()
@click.argument("source_a", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("source_b", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_output_option
@_dct_option
@_locale_option
def compare(
    source_a: Path,
    source_b: Path,
    output: Path | None,
    dct: dt.date | None,
    locale_table: str | None,
) -> None:
    """Compare two documents: surface bigram overlap vs. timeline similarity."""
    result_a = _process(source_a, dct, locale_table)
    result_b = _process(source_b, dct, locale_table)
    payload = {
        "bigramOverlap": bigram_overlap(result_a.document.text, result_b.document.text),
        "timelineSimilarity": timeline_similarity(result_a.timeline, result_b.timeline),
    }
    _write(canonical_json(payload), output)


@main.command()
@click.option("--listen", default=None, help="host:port to bind (default: HEART_LISTEN or 127.0.0.1:8787)")
@_locale_option
@click.option("--spacing", type=click.Choice(["ordinal", "proportional"]), default="ordinal", show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None, help="directory with the browser viewer bundle")
def serve(listen: str | None, locale_table: str | None, spacing: str, static_dir: str | None) -> None:
    """Run the HTTP service."""
    from .service import ServiceConfig, run

    base = ServiceConfig.from_env()
    host, port = base.host, base.port
    if listen:
        host_part, _, port_text = listen.rpartition(":")
        try:
            port = int(port_text)
        except ValueError:
            raise click.BadParameter(f"--listen must look like host:port, got {listen!r}")
        host = host_part or host
    config = ServiceConfig(
        host=host,
        port=port,
        spacing=spacing,
        locale_table_path=locale_table or base.locale_table_path,
        static_dir=static_dir or base.static_dir,
    )
    run(config)


if __name__ == "__main__":  # pragma: no cover
    main()

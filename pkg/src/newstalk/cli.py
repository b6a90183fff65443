"""Command-line entry points: ingest, serve, analyze.

Every flag can also be set through an environment variable with the
NEWSTALK_ prefix (e.g. NEWSTALK_CORPUS); explicit flags win.
"""

from __future__ import annotations

import json
import sys

import click

from newstalk.analytics import analyze as analyze_log
from newstalk.analytics import render_report
from newstalk.dialogue import EngineConfig
from newstalk.ingest import CorpusFormatError, build_graph
from newstalk.nlu import NluConfig
from newstalk.service import ChatService, build_app


@click.group(context_settings={"auto_envvar_prefix": "NEWSTALK"})
def main():
    """Conversational exploratory news search."""


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True), help="JSON Lines article corpus.")
@click.option("--gazetteer", required=True, type=click.Path(exists=True), help="JSON gazetteer document.")
@click.option("--report", "report_path", type=click.Path(), help="Write the ingest report here as JSON.")
def ingest(corpus, gazetteer, report_path):
    """Build the knowledge graph once and print its statistics."""
    try:
        graph, report = build_graph(corpus, gazetteer)
    except CorpusFormatError as exc:
        raise click.ClickException(str(exc)) from exc
    graph.validate()
    stats = graph.graph_stats().as_dict()
    click.echo(json.dumps(stats, indent=2))
    if report.skipped:
        click.echo(f"skipped {len(report.skipped)} record(s)", err=True)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2, ensure_ascii=False)
        click.echo(f"report written to {report_path}", err=True)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--gazetteer", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int, help="Session PRNG seed (replayable transcripts).")
@click.option("--log", "log_path", type=click.Path(), help="Append-only turn log (JSON Lines).")
@click.option("--page-size", default=3, show_default=True, type=int)
@click.option("--suggestions", default=3, show_default=True, type=int)
@click.option("--fuzzy-threshold", default=0.75, show_default=True, type=float)
@click.option("--fuzzy-distance-cap", default=None, type=int, help="Cap fuzzy edit distance (0 disables fuzzy).")
def serve(corpus, gazetteer, port, host, seed, log_path, page_size, suggestions, fuzzy_threshold, fuzzy_distance_cap):
    """Ingest the corpus and serve the chat API."""
    import uvicorn

    try:
        graph, _ = build_graph(corpus, gazetteer)
    except CorpusFormatError as exc:
        raise click.ClickException(str(exc)) from exc
    graph.validate()
    service = ChatService(
        graph,
        seed=seed,
        engine_config=EngineConfig(page_size=page_size, suggestions=suggestions),
        nlu_config=NluConfig(fuzzy_score_threshold=fuzzy_threshold, fuzzy_distance_cap=fuzzy_distance_cap),
        log_path=log_path,
    )
    app = build_app(service)
    stats = graph.graph_stats()
    click.echo(f"graph ready: {stats.articles} articles, {stats.entities} entities", err=True)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", default="table", show_default=True, type=click.Choice(["table", "json-lines"]))
def analyze(log_path, fmt):
    """Compute the conversation log metrics."""
    try:
        report = analyze_log(log_path)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(render_report(report, fmt))


if __name__ == "__main__":
    sys.exit(main())

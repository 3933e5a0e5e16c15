"""Command-line interface: ask, materialize, eval, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corpus import evaluate_corpus, load_corpus, report_table
from .materialize import TOPOLOGICAL_PREDICATES, materialize, to_ntriples
from .pipeline import build_engine
from .terms import GEO, GeoAskError

PIPELINE_FAILURE = 2

_PREDICATE_NAMES = {
    "within": GEO.sfWithin,
    "contains": GEO.sfContains,
    "intersects": GEO.sfIntersects,
}


@click.group()
def main():
    """Translate natural-language geographic questions into executable queries."""


def _engine_or_exit(kg: str, materialized: str | None):
    try:
        return build_engine(kg, materialized)
    except GeoAskError as exc:
        click.echo(json.dumps({"error": str(exc)}))
        sys.exit(PIPELINE_FAILURE)


@main.command()
@click.option("--kg", required=True, type=click.Path(exists=True, file_okay=False), help="Fixture directory of .nt files.")
@click.option("--question", default=None, help="Question text.")
@click.option("--stdin", "from_stdin", is_flag=True, help="Read the question from standard input.")
@click.option("--materialized", default=None, type=click.Path(exists=True, dir_okay=False), help="Materialized relations file.")
@click.option("--no-execute", is_flag=True, help="Generate the query without executing it.")
@click.option("--trace", "with_trace", is_flag=True, help="Include the annotation trace in the output.")
@click.option("--emit-sparql", is_flag=True, help="Print only the generated query text.")
def ask(kg, question, from_stdin, materialized, no_execute, with_trace, emit_sparql):
    """Answer one question against the knowledge graph."""
    if from_stdin and question is None:
        question = sys.stdin.read()
    if question is None or not question.strip():
        click.echo(json.dumps({"error": "empty question"}))
        sys.exit(PIPELINE_FAILURE)
    engine = _engine_or_exit(kg, materialized)
    try:
        response = engine.ask(question, execute=not no_execute, include_trace=with_trace)
    except GeoAskError as exc:
        click.echo(json.dumps({"error": str(exc)}))
        sys.exit(PIPELINE_FAILURE)
    if emit_sparql:
        click.echo(response.sparql)
        return
    click.echo(json.dumps(response.to_json(), indent=2, sort_keys=False))


@main.command()
@click.option("--kg", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=False))
@click.option(
    "--predicates",
    default="within,contains,intersects",
    show_default=True,
    help="Comma-separated subset of within,contains,intersects.",
)
def materialize_cmd(kg, out, predicates):
    """Precompute topological relations and write them as N-Triples."""
    engine = _engine_or_exit(kg, None)
    try:
        wanted = set()
        for name in predicates.split(","):
            name = name.strip()
            if not name:
                continue
            if name not in _PREDICATE_NAMES:
                raise GeoAskError(f"unknown predicate {name!r}; choose from {sorted(_PREDICATE_NAMES)}")
            wanted.add(_PREDICATE_NAMES[name])
        relations = materialize(engine.store, wanted or set(TOPOLOGICAL_PREDICATES))
        text = to_ntriples(relations)
        Path(out).write_text(text, encoding="utf-8")
    except (GeoAskError, OSError, ValueError) as exc:
        click.echo(json.dumps({"error": str(exc)}))
        sys.exit(PIPELINE_FAILURE)
    click.echo(f"wrote {len(relations)} relations to {out}")


main.add_command(materialize_cmd, name="materialize")


@main.command(name="eval")
@click.option("--kg", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--materialized", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
def eval_cmd(kg, corpus_path, materialized, report_path):
    """Run the gold corpus under the exact-match protocol."""
    engine = _engine_or_exit(kg, materialized)
    try:
        entries = load_corpus(corpus_path)
    except GeoAskError as exc:
        click.echo(json.dumps({"error": str(exc)}))
        sys.exit(PIPELINE_FAILURE)
    report = evaluate_corpus(engine, entries)
    click.echo(report_table(report))
    if report_path:
        Path(report_path).write_text(
            json.dumps(report, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        click.echo(f"report written to {report_path}")


@main.command()
@click.option("--kg", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--materialized", default=None, type=click.Path(exists=True, dir_okay=False))
def serve(kg, port, host, materialized):
    """Serve POST /ask, GET /health and GET /ontology."""
    import uvicorn

    from .service import create_app

    app = create_app(kg, materialized)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

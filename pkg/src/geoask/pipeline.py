"""End-to-end engine: question text in, executed query and answers out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import AnnotationSet, annotate_question
from .kg import TripleStore, load_kg, load_kg_dir
from .materialize import load_into, materialized_predicates
from .nlp import DepGraph, parse_question
from .querygen import generate, gost_rewrite
from .sparql import ResultSet, SpatialFunctions, evaluate, parse, serialize
from .terms import GeoAskError


@dataclass
class AskResponse:
    question: str
    sparql: str
    rewritten_sparql: str
    answers: ResultSet | None
    return_types: list[str]
    trace: dict | None
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "question": self.question,
            "sparql": self.sparql,
            "rewrittenSparql": self.rewritten_sparql,
            "answers": self.answers.to_json() if self.answers is not None else None,
            "returnTypes": list(self.return_types),
            "trace": self.trace,
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }


class Engine:
    """Shares an immutable store and geometry cache across questions."""

    def __init__(self, store: TripleStore, classifier=None):
        self.store = store
        self.classifier = classifier
        self.geo = SpatialFunctions()
        self.materialized = materialized_predicates(store)

    @classmethod
    def from_paths(cls, kg_dir: str | Path, materialized_file: str | Path | None = None, classifier=None):
        store = load_kg_dir(kg_dir)
        if materialized_file:
            _load_materialized_file(store, materialized_file)
        return cls(store, classifier)

    def ask(self, question: str, execute: bool = True, include_trace: bool = True) -> AskResponse:
        timings: dict[str, float] = {}

        t0 = time.perf_counter()
        graph: DepGraph = parse_question(question)
        timings["parse"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        aset: AnnotationSet = annotate_question(graph, self.store, self.classifier)
        timings["annotate"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        query = generate(aset, graph, self.store.ontology)
        sparql_text = serialize(query)
        timings["generate"] = (time.perf_counter() - t0) * 1000

        t0 = time.perf_counter()
        rewritten = gost_rewrite(query, self.materialized)
        rewritten_text = serialize(rewritten)
        timings["rewrite"] = (time.perf_counter() - t0) * 1000

        answers = None
        if execute:
            t0 = time.perf_counter()
            answers = evaluate(rewritten, self.store, self.geo)
            timings["execute"] = (time.perf_counter() - t0) * 1000

        trace = None
        if include_trace:
            trace = {
                "tokens": [
                    {"index": t.index, "surface": t.surface, "lemma": t.lemma, "pos": t.pos}
                    for t in graph.tokens
                ],
                "dependencies": [
                    {"head": h, "dependent": d, "label": label} for h, d, label in graph.edges
                ],
                "root": graph.root,
                "annotations": aset.to_json(),
                "sparql": sparql_text,
                "rewrittenSparql": rewritten_text,
            }
        return AskResponse(
            question=question,
            sparql=sparql_text,
            rewritten_sparql=rewritten_text,
            answers=answers,
            return_types=list(aset.return_types),
            trace=trace,
            timings=timings,
        )


def _load_materialized_file(store: TripleStore, path: str | Path):
    from .kg import parse_ntriples_line

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parsed = parse_ntriples_line(line, str(path), lineno)
            if parsed is not None:
                store.add(*parsed)


def build_engine(kg_dir: str | Path, materialized_file: str | Path | None = None, classifier=None) -> Engine:
    return Engine.from_paths(kg_dir, materialized_file, classifier)


class PipelineError(GeoAskError):
    pass

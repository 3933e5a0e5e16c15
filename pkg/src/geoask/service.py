"""JSON-over-HTTP service exposing the pipeline; see docs/api.md."""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .kg import preferred_label
from .pipeline import Engine, build_engine
from .terms import GeoAskError


def create_app(kg_dir: str, materialized_file: str | None = None, engine: Engine | None = None) -> FastAPI:
    """App factory; the store loads once at startup and is shared read-only."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.engine is None:
            app.state.engine = engine or build_engine(kg_dir, materialized_file)
        yield

    app = FastAPI(title="geoask", lifespan=lifespan)
    app.state.engine = engine

    @app.get("/health")
    def health():
        if app.state.engine is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        return {"status": "ok", "features": len(app.state.engine.store.features)}

    @app.post("/ask")
    async def ask(request: Request):
        if app.state.engine is None:
            return JSONResponse({"error": "knowledge graph not loaded"}, status_code=503)
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "request body must be JSON"}, status_code=400)
        question = (body or {}).get("question", "")
        if not isinstance(question, str) or not question.strip():
            return JSONResponse({"error": "question must be a non-empty string"}, status_code=400)
        try:
            response = app.state.engine.ask(question)
        except GeoAskError as exc:
            return JSONResponse({"error": str(exc)}, status_code=500)
        return response.to_json()

    @app.get("/ontology")
    def ontology():
        if app.state.engine is None:
            return JSONResponse({"error": "knowledge graph not loaded"}, status_code=503)
        store = app.state.engine.store
        onto = store.ontology
        classes = []
        for cls in sorted(onto.class_synonyms):
            syns = onto.class_synonyms[cls]
            classes.append(
                {
                    "iri": cls.value,
                    "label": syns[0] if syns else cls.value.rsplit("#", 1)[-1],
                    "synonyms": list(syns),
                    "parent": onto.parent[cls].value if cls in onto.parent else None,
                    "features": len(store.features_of_class(cls)),
                }
            )
        properties = []
        seen = set()
        for cls in sorted(onto.properties):
            for prop_iri, info in sorted(onto.properties[cls].items()):
                key = (prop_iri, cls)
                if key in seen:
                    continue
                seen.add(key)
                properties.append(
                    {
                        "iri": prop_iri.value,
                        "label": info.synonyms[0] if info.synonyms else prop_iri.value.rsplit("#", 1)[-1],
                        "synonyms": list(info.synonyms),
                        "domain": cls.value,
                        "range": info.range.value if info.range else None,
                    }
                )
        return {"classes": classes, "properties": properties}

    @app.get("/labels/{resource:path}")
    def labels(resource: str):
        if app.state.engine is None:
            return JSONResponse({"error": "knowledge graph not loaded"}, status_code=503)
        store = app.state.engine.store
        from .terms import Iri

        feat = store.features.get(Iri(resource))
        if feat is None:
            return JSONResponse({"error": "unknown resource"}, status_code=404)
        return {"iri": resource, "label": preferred_label(feat), "labels": [list(l) for l in feat.labels]}

    return app

"""Validation HTTP service.

Every response carries the elapsed processing time in an envelope; the
adjudication payload inside the envelope is the same canonical JSON the
CLI emits, embedded verbatim so the two interfaces are byte-identical.
Malformed requests get a 400 with a machine-readable error envelope, not
a stack trace.  Shared lexicon, ontology and knowledge base are loaded
once and treated as immutable; audit writes serialize through the store
lock.
"""

from __future__ import annotations

import json
import time

from fastapi import FastAPI, Request, Response

from .adjudicator import DocumentError, adjudicate, adjudication_to_dict, bill_from_dict
from .config import RunConfig, load_engine
from .store import canonical_json


def _envelope(payload_json: str, started: float, status_code: int = 200) -> Response:
    elapsed_ms = round((time.perf_counter() - started) * 1000, 3)
    body = f'{{"elapsed_ms":{elapsed_ms},"result":{payload_json}}}'
    return Response(content=body, media_type="application/json", status_code=status_code)


def _error(code: str, detail: str, started: float, status_code: int) -> Response:
    payload = canonical_json({"error": {"code": code, "detail": detail}})
    return _envelope(payload, started, status_code)


def create_app(config: RunConfig) -> FastAPI:
    engine = load_engine(config)
    app = FastAPI(title="claims validation", docs_url=None, redoc_url=None)

    @app.post("/v1/validate")
    async def validate(request: Request) -> Response:
        started = time.perf_counter()
        raw = await request.body()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error("MALFORMED_JSON", str(exc), started, 400)
        try:
            bill = bill_from_dict(data)
        except DocumentError as exc:
            return _error("MALFORMED_BILL", str(exc), started, 400)
        adj = adjudicate(
            bill, engine.kb, engine.ontology, engine.lexicon, engine.adjudicator_config
        )
        payload = canonical_json(adjudication_to_dict(adj))
        engine.kb.append_audit(json.loads(payload))
        return _envelope(payload, started)

    @app.get("/v1/benchmarks/{doc_type}/{subtype}")
    def get_benchmark(doc_type: str, subtype: str) -> Response:
        started = time.perf_counter()
        payload = engine.kb.get_benchmark(doc_type, subtype)
        if payload is None:
            return _error("NOT_FOUND", f"no benchmark {doc_type}/{subtype}", started, 404)
        return _envelope(canonical_json(payload), started)

    @app.get("/v1/health")
    def health() -> Response:
        started = time.perf_counter()
        components = {
            "lexicon": engine.lexicon is not None,
            "ontology": bool(engine.ontology.axioms),
            "kb": engine.kb.manifest_path.exists(),
        }
        payload = canonical_json(
            {"status": "ok" if all(components.values()) else "degraded",
             "components": components}
        )
        return _envelope(payload, started)

    return app

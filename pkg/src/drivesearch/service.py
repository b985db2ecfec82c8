"""HTTP face of the query engine.

JSON in, JSON out; queries never mutate state. Reload builds a fresh engine
snapshot from the configured paths and swaps it in atomically, so requests
already running keep the snapshot they started with.
"""

from __future__ import annotations

import logging
import mimetypes
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import Engine, EngineConfig, Query, Weights, load_engine
from .errors import (
    BackendUnavailable,
    DriveSearchError,
    EmptyCorpus,
    FingerprintMismatch,
    NotFound,
    ProviderUnavailable,
)

logger = logging.getLogger(__name__)

_STATUS_BY_ERROR = {
    NotFound: 404,
    FingerprintMismatch: 409,
    ProviderUnavailable: 502,
    BackendUnavailable: 502,
    EmptyCorpus: 503,
}


def _status_for(exc: DriveSearchError) -> int:
    for cls, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, cls):
            return status
    return 400


class WeightsBody(BaseModel):
    video: float = 1.0
    signal: float = 1.0


class QueryBody(BaseModel):
    text: str = ""
    top_n: int = 10
    weights: WeightsBody = WeightsBody()
    prompt_id: int | None = None


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="drivesearch", docs_url=None, redoc_url=None)
    app.state.engine = engine

    # the browser console may be served from another origin in development
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(DriveSearchError)
    async def domain_error(_request: Request, exc: DriveSearchError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": exc.code, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400,
                            content={"error": "invalid_request", "message": str(exc)})

    @app.get("/api/v1/health")
    def health():
        eng: Engine = app.state.engine
        return {"status": "ok", "records": eng.record_count}

    @app.post("/api/v1/query")
    def query(body: QueryBody):
        eng: Engine = app.state.engine
        q = Query(
            text=body.text,
            top_n=body.top_n,
            weights=Weights(video=body.weights.video, signal=body.weights.signal),
            prompt_id=body.prompt_id,
        )
        return eng.query(q).as_dict()

    @app.get("/api/v1/records/{record_id}")
    def get_record(record_id: str):
        eng: Engine = app.state.engine
        return eng.get_record(record_id)

    @app.get("/api/v1/records/{record_id}/frames/{index}")
    def get_frame(record_id: str, index: int):
        eng: Engine = app.state.engine
        frame = eng.frame(record_id, index)
        path = Path(frame.uri)
        if not path.is_file():
            raise NotFound(f"frame file {frame.uri!r} is missing on disk")
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return Response(content=path.read_bytes(), media_type=media_type)

    @app.get("/api/v1/plots/{key}")
    def get_plot(key: str):
        eng: Engine = app.state.engine
        return eng.plot_document(key)

    @app.post("/api/v1/reload")
    def reload_indexes():
        eng: Engine = app.state.engine
        fresh = load_engine(eng.config)
        app.state.engine = fresh  # atomic swap; in-flight queries keep the old one
        logger.info("reloaded engine: %d records", fresh.record_count)
        return {"status": "ok", "records": fresh.record_count}

    return app


def serve(config: EngineConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Load the engine per ``config`` and serve until interrupted."""
    import uvicorn

    app = create_app(load_engine(config))
    uvicorn.run(app, host=host, port=port, log_level="info")

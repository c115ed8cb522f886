"""HTTP service for the embedding protocol.

GET /health  -> {"status": "ok", "model": <name>, "dim": <int>}
POST /embed  -> {"dim": <int>, "vectors": [[[float, ...], ...], ...]}
                one vector list per sentence, one vector per input token.

Schema violations answer 400; a failed model load answers 503 on every
endpoint. The service is stateless between requests.
"""

from __future__ import annotations

import argparse

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .encoder import Encoder


class EmbedRequest(BaseModel):
    sentences: list[list[str]]
    model: str = "default"


def create_app(model_name: str, device: str = "cpu") -> FastAPI:
    app = FastAPI(title="folembed")
    load_error: str | None = None
    encoder: Encoder | None = None
    try:
        encoder = Encoder(model_name, device=device)
    except Exception as err:  # model missing, corrupt checkpoint, ...
        load_error = f"{type(err).__name__}: {err}"

    @app.exception_handler(RequestValidationError)
    async def bad_schema(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    def health():
        if encoder is None:
            return JSONResponse(status_code=503,
                                content={"status": "error", "detail": load_error})
        return {"status": "ok", "model": encoder.model_name, "dim": encoder.dim}

    @app.post("/embed")
    def embed(request: EmbedRequest):
        if encoder is None:
            return JSONResponse(status_code=503,
                                content={"status": "error", "detail": load_error})
        vectors = encoder.encode(request.sentences)
        return {"dim": encoder.dim, "vectors": vectors}

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="folembed",
                                     description="FOL token embedding service")
    parser.add_argument("--model", required=True,
                        help="checkpoint name or path loadable by transformers")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8601)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    import uvicorn

    uvicorn.run(create_app(args.model, device=args.device),
                host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

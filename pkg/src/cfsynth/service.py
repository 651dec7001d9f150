"""Stateless HTTP JSON service exposing suggest/apply to UI clients.

Request bodies are validated by hand so schema errors carry JSON-pointer
paths (e.g. ``/examples/0/row``) instead of framework-specific messages.
Tables travel inline (CSV text or a single column object); no session
state exists, so any request sequence is reproducible in isolation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .engine import SuggestRequest, apply, suggest
from .errors import (
    CfSynthError,
    EmptyTable,
    InvalidAnnotation,
    MalformedInput,
    NoCandidates,
    NoPredicates,
    SchemaError,
    TypeMismatch,
)
from .ranking import RankerWeights, default_weights, load_weights
from .rules import parse_rule
from .synthesis import SynthesisConfig
from .table import (
    Annotation,
    SourceRef,
    TypedColumn,
    build_column,
    lowercase_column,
    parse_table,
    resolve_column,
)

DEFAULT_MAX_REQUEST_BYTES = 5 * 1024 * 1024


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8731
    weights_path: str | None = None
    max_request_bytes: int = DEFAULT_MAX_REQUEST_BYTES
    log_level: str = "info"
    handraise_threshold: int = 3

    def __post_init__(self) -> None:
        if not (1 <= self.port <= 65535):
            raise ValueError("port must be in [1, 65535]")
        if self.max_request_bytes < 1:
            raise ValueError("max_request_bytes must be positive")
        if self.handraise_threshold < 1:
            raise ValueError("handraise_threshold must be >= 1")


def resolve_weights(explicit_path: str | None = None) -> RankerWeights:
    """Weights precedence: explicit path, then CFSYNTH_WEIGHTS, then the
    shipped defaults. Raises ValueError on malformed files."""
    path = explicit_path or os.environ.get("CFSYNTH_WEIGHTS")
    if path:
        return load_weights(path)
    return default_weights()


def _error(status: int, code: str, message: str, path: str | None = None) -> JSONResponse:
    payload: dict = {"error": {"code": code, "message": message}}
    if path is not None:
        payload["error"]["path"] = path
    return JSONResponse(payload, status_code=status)


def _expect_object(body: object) -> dict:
    if not isinstance(body, dict):
        raise SchemaError("/", "expected a JSON object")
    return body


def _parse_examples(body: dict) -> Annotation:
    if "examples" not in body:
        raise SchemaError("/examples", "missing required key")
    raw = body["examples"]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("/examples", "expected a non-empty array")
    examples = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise SchemaError(f"/examples/{i}", "expected an object")
        if "row" not in entry:
            raise SchemaError(f"/examples/{i}/row", "missing required key")
        row = entry["row"]
        if not isinstance(row, int) or isinstance(row, bool) or row < 0:
            raise SchemaError(f"/examples/{i}/row", "expected a 0-based row index")
        if "format" not in entry:
            raise SchemaError(f"/examples/{i}/format", "missing required key")
        fmt = entry["format"]
        if not isinstance(fmt, str) or not fmt:
            raise SchemaError(f"/examples/{i}/format", "expected a non-empty string")
        examples.append((row, fmt))
    try:
        return Annotation(tuple(examples))
    except InvalidAnnotation as exc:
        raise SchemaError("/examples", str(exc)) from exc


def _parse_options(body: dict) -> dict:
    raw = body.get("options", {})
    if not isinstance(raw, dict):
        raise SchemaError("/options", "expected an object")
    options = {
        "delimiter": ",",
        "header": True,
        "fold": False,
        "case_insensitive": False,
    }
    config_fields = {
        "max_tree_nodes": int,
        "accuracy_floor": (int, float),
        "labeled_weight": (int, float),
        "max_candidates": int,
    }
    for key, value in raw.items():
        path = f"/options/{key}"
        if key == "delimiter":
            if not isinstance(value, str) or len(value) != 1:
                raise SchemaError(path, "expected a single-character string")
            options["delimiter"] = value
        elif key in ("header", "fold", "case_insensitive"):
            if not isinstance(value, bool):
                raise SchemaError(path, "expected a boolean")
            options[key] = value
        elif key in config_fields:
            want = config_fields[key]
            if isinstance(value, bool) or not isinstance(value, want):
                raise SchemaError(path, "expected a number")
            options[key] = value
        else:
            raise SchemaError(path, "unknown option")
    return options


def _build_synthesis_config(options: dict) -> SynthesisConfig:
    kwargs = {
        k: options[k]
        for k in ("max_tree_nodes", "accuracy_floor", "labeled_weight", "max_candidates")
        if k in options
    }
    try:
        return SynthesisConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError("/options", str(exc)) from exc


def _parse_column_object(obj: dict) -> TypedColumn:
    if "cells" not in obj:
        raise SchemaError("/table/cells", "missing required key")
    raw_cells = obj["cells"]
    if not isinstance(raw_cells, list) or not raw_cells:
        raise SchemaError("/table/cells", "expected a non-empty array")
    for i, cell in enumerate(raw_cells):
        if not isinstance(cell, str):
            raise SchemaError(f"/table/cells/{i}", "expected a string")
    name = obj.get("name", "A")
    if not isinstance(name, str):
        raise SchemaError("/table/name", "expected a string")
    ref = SourceRef()
    if "source_ref" in obj:
        raw_ref = obj["source_ref"]
        if not isinstance(raw_ref, dict):
            raise SchemaError("/table/source_ref", "expected an object")
        letter = raw_ref.get("column_letter", "A")
        first_row = raw_ref.get("first_row", 2)
        if not isinstance(letter, str) or not letter.isalpha():
            raise SchemaError("/table/source_ref/column_letter", "expected column letters")
        if not isinstance(first_row, int) or isinstance(first_row, bool) or first_row < 1:
            raise SchemaError("/table/source_ref/first_row", "expected a positive integer")
        ref = SourceRef(letter.upper(), first_row)
    return build_column(name, raw_cells, source_ref=ref)


def _parse_table_and_column(body: dict, options: dict) -> TypedColumn:
    if "table" not in body:
        raise SchemaError("/table", "missing required key")
    table = body["table"]
    if isinstance(table, str):
        try:
            columns = parse_table(
                table, delimiter=options["delimiter"], header=options["header"]
            )
        except (MalformedInput, EmptyTable) as exc:
            raise SchemaError("/table", str(exc)) from exc
        selector = body.get("column", 0)
        if not isinstance(selector, (str, int)) or isinstance(selector, bool):
            raise SchemaError("/column", "expected a column name or 0-based index")
        try:
            column = resolve_column(columns, selector)
        except SchemaError as exc:
            raise SchemaError("/column", exc.reason) from exc
    elif isinstance(table, dict):
        column = _parse_column_object(table)
    else:
        raise SchemaError("/table", "expected CSV text or a column object")
    if options["case_insensitive"]:
        column = lowercase_column(column)
    return column


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    if config is None:
        config = ServiceConfig()
    weights = resolve_weights(config.weights_path)
    app = FastAPI(title="cfsynth", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    async def read_json_body(request: Request) -> object:
        body = await request.body()
        if len(body) > config.max_request_bytes:
            raise _PayloadTooLarge(len(body))
        try:
            return json.loads(body)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError("/", f"body is not valid JSON: {exc}") from exc

    @app.get("/v1/health")
    async def health() -> Response:
        return JSONResponse({"status": "ok"})

    @app.get("/v1/config")
    async def service_config() -> Response:
        return JSONResponse({"handraise_threshold": config.handraise_threshold})

    @app.post("/v1/suggest")
    async def http_suggest(request: Request) -> Response:
        try:
            body = _expect_object(await read_json_body(request))
            options = _parse_options(body)
            column = _parse_table_and_column(body, options)
            annotation = _parse_examples(body)
            top_k = body.get("top_k", 3)
            if not isinstance(top_k, int) or isinstance(top_k, bool) or top_k < 1:
                raise SchemaError("/top_k", "expected a positive integer")
            known = {"table", "column", "examples", "top_k", "options"}
            for key in body:
                if key not in known:
                    raise SchemaError(f"/{key}", "unknown key")
            req = SuggestRequest(
                column=column,
                annotation=annotation,
                config=_build_synthesis_config(options),
                top_k=top_k,
                weights=weights,
                fold=options["fold"],
            )
            response = suggest(req)
        except _PayloadTooLarge as exc:
            return _error(413, "payload_too_large", str(exc))
        except SchemaError as exc:
            return _error(400, "schema_error", exc.reason, exc.path)
        except InvalidAnnotation as exc:
            return _error(400, "invalid_annotation", str(exc))
        except NoPredicates as exc:
            return _error(422, "no_predicates", str(exc))
        except NoCandidates as exc:
            return _error(422, "no_candidates", str(exc))
        return JSONResponse(response.to_json(len(column)))

    @app.post("/v1/apply")
    async def http_apply(request: Request) -> Response:
        try:
            body = _expect_object(await read_json_body(request))
            options = _parse_options(body)
            column = _parse_table_and_column(body, options)
            if "rule" not in body:
                raise SchemaError("/rule", "missing required key")
            try:
                rule = parse_rule(body["rule"])
            except SchemaError as exc:
                prefixed = "/rule" + (exc.path if exc.path != "/" else "")
                raise SchemaError(prefixed, exc.reason) from exc
            known = {"table", "column", "rule", "options"}
            for key in body:
                if key not in known:
                    raise SchemaError(f"/{key}", "unknown key")
            result = apply(rule, column, fold=options["fold"])
        except _PayloadTooLarge as exc:
            return _error(413, "payload_too_large", str(exc))
        except SchemaError as exc:
            return _error(400, "schema_error", exc.reason, exc.path)
        except TypeMismatch as exc:
            return _error(422, "type_mismatch", str(exc))
        return JSONResponse(result.to_json(len(column)))

    return app


class _PayloadTooLarge(Exception):
    def __init__(self, size: int):
        super().__init__(f"request body of {size} bytes exceeds the limit")
        self.size = size


def serve(config: ServiceConfig | None = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    if config is None:
        config = ServiceConfig()
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)

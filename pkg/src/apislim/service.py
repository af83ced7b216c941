"""HTTP facade over one library's model, usage data, and annotations.

Single-library, single-session service: reads are side-effect free and
byte-stable (canonical JSON), the annotation set is replaced wholesale by
PUT, validated first, and persisted atomically so the file on disk always
reflects the last accepted set.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__ as _tool_version
from .annotations import AnnotationSet, validate
from .classify import (
    ClassificationReport,
    classify,
    suggest_moves,
    suggest_removals,
)
from .generator import GenerationError, generate
from .jsonutil import (
    SCHEMA_ANNOTATIONS,
    SCHEMA_API,
    SCHEMA_EXTRACT_REPORT,
    SCHEMA_GENERATED,
    SCHEMA_MIGRATION,
    SCHEMA_USAGES,
    canonical_json,
    dump_json_atomic,
    load_json,
)
from .miner import UsageCounts, usages_from_json_dict, usages_to_json_dict
from .model import ApiModel


@dataclass
class ServiceState:
    model: ApiModel
    usages: UsageCounts
    usages_doc: dict
    classification: ClassificationReport
    annotations: AnnotationSet
    annotations_path: Path
    write_lock: threading.Lock = field(default_factory=threading.Lock)


def load_state(api_path: str, usages_path: str, annotations_path: str) -> ServiceState:
    """Load and cross-validate the three service inputs."""
    model = ApiModel.from_json_dict(load_json(api_path))
    usages_doc = load_json(usages_path)
    usages_library, usages, _report, _lints = usages_from_json_dict(usages_doc)
    classification = classify(model, usages, usages_library)

    path = Path(annotations_path)
    if path.exists():
        aset = AnnotationSet.from_json_dict(load_json(path))
        if aset.library_name != model.library_name:
            raise ValueError(
                f"annotations are for {aset.library_name}, model is {model.library_name}"
            )
    else:
        aset = AnnotationSet.empty(model.library_name, model.library_version)
    return ServiceState(
        model=model,
        usages=usages,
        usages_doc=usages_doc,
        classification=classification,
        annotations=aset,
        annotations_path=path,
    )


def _json_response(data: dict, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(data), media_type="application/json", status_code=status_code
    )


def _public_view(model: ApiModel) -> dict:
    """The api/1 document restricted to publicly reachable elements."""
    doc = model.to_json_dict()
    kept_modules = []
    for mod in doc["modules"]:
        classes = []
        for cls in mod["classes"]:
            if not model.is_public(cls["qname"]):
                continue
            cls = dict(cls)
            cls["methods"] = [m for m in cls["methods"] if model.is_public(m["qname"])]
            classes.append(cls)
        functions = [f for f in mod["functions"] if model.is_public(f["qname"])]
        has_content = classes or functions or mod["reexports"]
        if model.is_public(mod["qname"]) or has_content:
            mod = dict(mod)
            mod["classes"] = classes
            mod["functions"] = functions
            kept_modules.append(mod)
    doc["modules"] = kept_modules
    return doc


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="apislim service", version=_tool_version, docs_url=None, redoc_url=None)
    app.state.service = state

    @app.get("/v1/health")
    def health() -> Response:
        return _json_response(
            {
                "status": "ok",
                "tool": {"name": "apislim", "version": _tool_version},
                "schemas": {
                    "api": SCHEMA_API,
                    "usages": SCHEMA_USAGES,
                    "annotations": SCHEMA_ANNOTATIONS,
                    "migration": SCHEMA_MIGRATION,
                    "extract_report": SCHEMA_EXTRACT_REPORT,
                    "generated": SCHEMA_GENERATED,
                },
                "library": {
                    "name": state.model.library_name,
                    "version": state.model.library_version,
                },
            }
        )

    @app.get("/v1/model")
    def get_model(public: bool = False) -> Response:
        if public:
            return _json_response(_public_view(state.model))
        return _json_response(state.model.to_json_dict())

    @app.get("/v1/usages")
    def get_usages() -> Response:
        return _json_response(state.usages_doc)

    @app.get("/v1/classification")
    def get_classification() -> Response:
        return _json_response(state.classification.to_json_dict())

    @app.get("/v1/annotations")
    def get_annotations() -> Response:
        return _json_response(state.annotations.to_json_dict())

    @app.put("/v1/annotations")
    async def put_annotations(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception:
            return _json_response({"detail": "body is not valid JSON"}, status_code=400)
        try:
            incoming = AnnotationSet.from_json_dict(body)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            return _json_response(
                {"detail": f"body is not an annotation set: {exc}"}, status_code=400
            )
        result = validate(incoming, state.model, state.classification)
        if incoming.library_name != state.model.library_name:
            result.error(
                "",
                f"annotations are for {incoming.library_name}, "
                f"model is {state.model.library_name}",
            )
        if not result.ok:
            return _json_response(result.to_json_dict(), status_code=422)
        with state.write_lock:
            dump_json_atomic(incoming.to_json_dict(), state.annotations_path)
            state.annotations = incoming
        return _json_response(
            {"accepted": len(incoming.annotations), "warnings": result.to_json_dict()["warnings"]}
        )

    @app.post("/v1/annotations/suggest")
    def suggest(moves: bool = True) -> Response:
        suggestions = list(suggest_removals(state.classification).annotations)
        if moves:
            suggestions.extend(suggest_moves(state.model).annotations)
        auto = AnnotationSet.build(
            state.model.library_name, state.model.library_version, suggestions
        )
        return _json_response(auto.to_json_dict())

    @app.post("/v1/generate")
    async def post_generate(request: Request) -> Response:
        package_name: Optional[str] = None
        body_bytes = await request.body()
        if body_bytes:
            try:
                body = await request.json()
            except Exception:
                return _json_response({"detail": "body is not valid JSON"}, status_code=400)
            if not isinstance(body, dict):
                return _json_response({"detail": "body must be an object"}, status_code=400)
            package_name = body.get("package_name")
        try:
            source = generate(state.model, state.annotations, package_name)
        except GenerationError as exc:
            return _json_response({"detail": str(exc)}, status_code=422)
        return _json_response(source.to_json_dict())

    return app


def build_app(
    api_path: str,
    usages_path: str,
    annotations_path: str,
    allow_origin: Optional[str] = None,
) -> FastAPI:
    state = load_state(api_path, usages_path, annotations_path)
    app = create_app(state)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[allow_origin] if allow_origin else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    return app


def serve(
    api_path: str,
    usages_path: str,
    annotations_path: str,
    port: int = 8080,
    allow_origin: Optional[str] = None,
    host: str = "127.0.0.1",
) -> None:
    import uvicorn

    app = build_app(api_path, usages_path, annotations_path, allow_origin)
    uvicorn.run(app, host=host, port=port, log_level="warning")

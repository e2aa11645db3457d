"""Read-only HTTP API over a built bundle.

The service loads one bundle at startup and serves it unchanged: entry
page, overview cards, expandable summaries, taxonomy neighborhoods, raw
second-level documents, and (profile permitting) open question
answering. The profile gates features: ``ose`` is a static dump with raw
documents only, ``hwn`` restricts cards to how/why sections and refuses
questions, ``yai4hu`` exposes everything. Every response validates
against the JSON schemas committed under ``espace/schemas``.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .bundle import Bundle, SCHEMA_VERSION, card_to_dict, load_bundle
from .config import profile_settings
from .errors import ValidationError

access_log = logging.getLogger("espace.service.access")


@dataclass
class ServiceConfig:
    bundle_path: str = ""
    host: str = "127.0.0.1"
    port: int = 8080
    profile: str | None = None  # default: the bundle's own profile
    open_qa_enabled: bool | None = None
    result_limit: int | None = None
    cors_allow_origins: list[str] = field(default_factory=list)
    static_dir: str | None = None

    def resolve(self, bundle: Bundle) -> "ResolvedService":
        profile = self.profile or bundle.profile
        settings = profile_settings(profile)
        open_qa = settings["open_qa_enabled"]
        if self.open_qa_enabled is not None:
            open_qa = self.open_qa_enabled and open_qa
        if profile in ("hwn", "ose"):
            open_qa = False  # the profile contract always wins
        return ResolvedService(
            profile=profile,
            open_qa_enabled=open_qa,
            visible_archetypes=set(settings["archetypes"]),
            static=bool(settings["static"]),
            result_limit=self.result_limit,
        )


@dataclass
class ResolvedService:
    profile: str
    open_qa_enabled: bool
    visible_archetypes: set[str]
    static: bool
    result_limit: int | None


def _error(status: int, message: str, **extra):
    return JSONResponse(status_code=status,
                        content={"error": message, **extra})


def _restrict_card(card_dict: dict, visible: set[str]) -> dict:
    card_dict = dict(card_dict)
    card_dict["sections"] = {
        aid: section
        for aid, section in card_dict["sections"].items()
        if aid in visible
    }
    return card_dict


def create_app(bundle: Bundle, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    resolved = config.resolve(bundle)
    app = FastAPI(title="espace", version="0.1.0", docs_url=None, redoc_url=None)

    if config.cors_allow_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_allow_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return _error(400, "malformed request body", detail=str(exc.errors()))

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        start = time.monotonic()
        response = await call_next(request)
        access_log.info(
            "%s",
            json.dumps(
                {
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "ms": round((time.monotonic() - start) * 1000, 2),
                },
                sort_keys=True,
            ),
        )
        return response

    doc_index = [
        {"id": d["id"], "title": d["title"], "url": d.get("url")}
        for d in bundle.documents
    ]

    @app.get("/api/health")
    def health():
        return {
            "schema_version": SCHEMA_VERSION,
            "profile": resolved.profile,
            "bundle_hash": bundle.bundle_hash,
            "nodes": len(bundle.es.nodes),
            "open_qa_enabled": resolved.open_qa_enabled,
        }

    @app.get("/api/entry")
    def entry():
        blocks = []
        for block in bundle.es.entry.blocks:
            links = [] if resolved.static else [list(l) for l in block["links"]]
            blocks.append(
                {
                    "paragraph_id": block["paragraph_id"],
                    "text": block["text"],
                    "links": links,
                }
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "profile": resolved.profile,
            "document_id": bundle.es.entry.document_id,
            "blocks": blocks,
            "documents": doc_index,
        }

    @app.get("/api/overview/{uri}")
    def overview(uri: str):
        if resolved.static:
            return _error(403, "overviews are disabled under a static profile",
                          feature="overview", profile=resolved.profile)
        card = bundle.es.nodes.get(uri)
        if card is None:
            return _error(404, f"no overview for uri {uri!r}", uri=uri)
        data = _restrict_card(card_to_dict(card), resolved.visible_archetypes)
        for section in data["sections"].values():
            for unit in section["units"]:
                unit["links"] = [list(l) for l in
                                 bundle.annotate(unit["snippet"]).links]
        data["abstract_links"] = (
            [list(l) for l in bundle.annotate(data["abstract"]).links]
            if data["abstract"] else []
        )
        data["schema_version"] = SCHEMA_VERSION
        return data

    @app.get("/api/summary/{node_id}/children")
    def summary_children(node_id: str):
        if resolved.static:
            return _error(403, "summaries are disabled under a static profile",
                          feature="summary", profile=resolved.profile)
        node = bundle.summary_node(node_id)
        if node is None:
            return _error(404, f"no summary node {node_id!r}", uri=node_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "node_id": node_id,
            "children": [
                {
                    "id": child.node_id,
                    "summary": child.summary,
                    "unit_index": child.unit_index,
                    "leaf": not child.children,
                }
                for child in node.children
            ],
        }

    @app.post("/api/ask")
    def ask(body: dict):
        if not resolved.open_qa_enabled:
            return _error(403,
                          f"open question answering is disabled under profile "
                          f"{resolved.profile!r}",
                          feature="ask", profile=resolved.profile)
        question = body.get("question")
        if not isinstance(question, str) or not question.strip():
            return _error(400, "body must carry a non-empty 'question' string")
        try:
            answers = bundle.answer_open_question(
                question, n=resolved.result_limit
            )
        except ValidationError as exc:
            return _error(400, str(exc))
        texts = bundle.paragraph_texts()
        return {
            "schema_version": SCHEMA_VERSION,
            "question": question,
            "answers": [
                {
                    "snippet": a.snippet,
                    "context": a.context,
                    "context_text": texts.get(a.context, ""),
                    "score": a.score,
                    "source_triple": a.source_triple,
                    "links": [list(l) for l in bundle.annotate(a.snippet).links],
                }
                for a in answers
            ],
        }

    @app.get("/api/taxonomy/{uri}")
    def taxonomy(uri: str):
        if resolved.static:
            return _error(403, "taxonomy is disabled under a static profile",
                          feature="taxonomy", profile=resolved.profile)
        if uri not in bundle.es.nodes:
            return _error(404, f"no node for uri {uri!r}", uri=uri)
        tree = bundle.forest.tree_of(uri)
        return {
            "schema_version": SCHEMA_VERSION,
            "uri": uri,
            "root_label": tree.root_label if tree else None,
            "parent": bundle.forest.parent_of(uri),
            "children": bundle.forest.children_of(uri),
            "tree_nodes": sorted(tree.nodes) if tree else [],
        }

    @app.get("/api/docs")
    def docs_index():
        return {"schema_version": SCHEMA_VERSION, "documents": doc_index}

    @app.get("/api/docs/{document_id}")
    def document(document_id: str):
        for doc in bundle.documents:
            if doc["id"] == document_id:
                return {
                    "schema_version": SCHEMA_VERSION,
                    "id": doc["id"],
                    "title": doc["title"],
                    "url": doc.get("url"),
                    "paragraphs": doc["paragraphs"],
                }
        return _error(404, f"no document {document_id!r}", uri=document_id)

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="explorer")

    return app


def serve(config: ServiceConfig):
    """Load the bundle and run the service until interrupted."""
    import uvicorn

    bundle = load_bundle(config.bundle_path)
    app = create_app(bundle, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")

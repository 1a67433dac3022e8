"""HTTP annotation service: claims, tagging routes, progress, exports.

Thin-client contract: annotators need nothing but a browser or an HTTP
client. Documents are claimed whole (one active claim each) so two people
never edit the same source file; all write routes require a bearer token
and an active claim on the enclosing document. Stale claims expire after
an idle timeout so an abandoned session cannot lock a document forever.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .autotag import (
    AutotagLexicon,
    AutotagPolicy,
    NoSuggestion,
    autotag_document,
    confirm_all,
    confirm_suggestion,
    suggest,
)
from .corpus import (
    CorpusStore,
    Document,
    IndexOutOfRange,
    Provenance,
    SentenceStatus,
    UnknownDocument,
    UnknownSentence,
)
from .serialization import export_tsv, export_xml
from .tagset import TagNode, Tagset, UnknownLabel

DEFAULT_CLAIM_TIMEOUT = 60 * 60  # seconds; one idle hour


@dataclass
class Annotator:
    annotator_id: str
    display_name: str
    token: str


def load_annotators(path) -> list[Annotator]:
    """Flat registry file: JSON list of {annotator_id, display_name, token}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [Annotator(**entry) for entry in data]


class ClaimState(str, Enum):
    ACTIVE = "active"
    RELEASED = "released"
    FINISHED = "finished"


@dataclass
class Claim:
    doc_id: str
    annotator_id: str
    claimed_at: float
    last_activity: float
    state: ClaimState = ClaimState.ACTIVE


class ClaimConflict(Exception):
    def __init__(self, doc_id: str, holder: str):
        super().__init__(f"document {doc_id!r} is claimed by {holder!r}")
        self.doc_id = doc_id
        self.holder = holder


class ClaimRequired(Exception):
    def __init__(self, doc_id: str):
        super().__init__(f"no active claim on document {doc_id!r}")
        self.doc_id = doc_id


class ClaimRegistry:
    """At most one active claim per document; acquisition is check-and-set."""

    def __init__(self, timeout: float = DEFAULT_CLAIM_TIMEOUT):
        self.timeout = timeout
        self._active: dict[str, Claim] = {}
        self._history: list[Claim] = []
        self._lock = threading.Lock()

    def claim(self, doc_id: str, annotator_id: str, now: float | None = None) -> Claim:
        now = time.time() if now is None else now
        with self._lock:
            current = self._active.get(doc_id)
            if current is not None:
                if now - current.last_activity > self.timeout:
                    current.state = ClaimState.RELEASED  # idle: auto-release
                    self._history.append(current)
                    del self._active[doc_id]
                elif current.annotator_id == annotator_id:
                    current.last_activity = now  # re-claim is idempotent
                    return current
                else:
                    raise ClaimConflict(doc_id, current.annotator_id)
            fresh = Claim(doc_id=doc_id, annotator_id=annotator_id,
                          claimed_at=now, last_activity=now)
            self._active[doc_id] = fresh
            return fresh

    def release(self, doc_id: str, annotator_id: str, finished: bool = False) -> Claim:
        with self._lock:
            current = self._active.get(doc_id)
            if current is None or current.annotator_id != annotator_id:
                raise ClaimRequired(doc_id)
            current.state = ClaimState.FINISHED if finished else ClaimState.RELEASED
            self._history.append(current)
            del self._active[doc_id]
            return current

    def holder(self, doc_id: str) -> str | None:
        with self._lock:
            current = self._active.get(doc_id)
            return current.annotator_id if current else None

    def touch(self, doc_id: str, annotator_id: str, now: float | None = None) -> None:
        """Record write activity; raises ClaimRequired without an active claim."""
        now = time.time() if now is None else now
        with self._lock:
            current = self._active.get(doc_id)
            if (current is None or current.annotator_id != annotator_id
                    or now - current.last_activity > self.timeout):
                raise ClaimRequired(doc_id)
            current.last_activity = now


def progress(store: CorpusStore, doc_id: str) -> dict:
    """Token counts by tagging state; the three buckets partition the total."""
    doc = store.document(doc_id)
    total = manual = auto = 0
    for sent in doc.sentences:
        for tok in sent.tokens:
            total += 1
            if tok.tag is None:
                continue
            if tok.tag.provenance == Provenance.MANUAL:
                manual += 1
            else:
                auto += 1
    return {"total_tokens": total, "manual": manual, "auto": auto,
            "untagged": total - manual - auto}


def document_status(doc: Document) -> str:
    statuses = {s.status for s in doc.sentences}
    if not statuses or statuses == {SentenceStatus.RAW}:
        return SentenceStatus.RAW.value
    if statuses == {SentenceStatus.COMPLETE}:
        return SentenceStatus.COMPLETE.value
    if statuses <= {SentenceStatus.RAW, SentenceStatus.AUTOTAGGED}:
        return SentenceStatus.AUTOTAGGED.value
    return SentenceStatus.IN_PROGRESS.value


def _tagset_tree(node: TagNode) -> dict:
    return {
        "label": node.label,
        "name": node.name,
        "convention": node.convention,
        "examples": list(node.examples),
        "children": [_tagset_tree(c) for c in node.children],
    }


class TagBody(BaseModel):
    leaf_label: str


class PolicyBody(BaseModel):
    mode: str = "unambiguous_only"
    min_count: int = 1


class ReleaseBody(BaseModel):
    finished: bool = False


def create_app(store: CorpusStore, tagset: Tagset,
               lexicon: AutotagLexicon | None = None,
               annotators: list[Annotator] | None = None,
               claim_timeout: float = DEFAULT_CLAIM_TIMEOUT,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="annotation service")
    claims = ClaimRegistry(timeout=claim_timeout)
    by_token = {a.token: a for a in (annotators or [])}
    app.state.store = store
    app.state.tagset = tagset
    app.state.lexicon = lexicon
    app.state.claims = claims

    def authed(authorization: str | None = Header(default=None)) -> Annotator:
        if authorization and authorization.startswith("Bearer "):
            annotator = by_token.get(authorization[7:])
            if annotator is not None:
                return annotator
        raise _HttpError(401, "Unauthorized", "missing or invalid bearer token")

    class _HttpError(Exception):
        def __init__(self, status: int, error: str, detail: str):
            self.status = status
            self.error = error
            self.detail = detail

    @app.exception_handler(_HttpError)
    async def _handle_http_error(request: Request, exc: _HttpError):
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.error, "detail": exc.detail})

    def _error(status: int, exc: Exception) -> _HttpError:
        return _HttpError(status, type(exc).__name__, str(exc))

    @app.exception_handler(UnknownDocument)
    @app.exception_handler(UnknownSentence)
    async def _handle_404(request: Request, exc: Exception):
        return JSONResponse(status_code=404,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(UnknownLabel)
    @app.exception_handler(IndexOutOfRange)
    @app.exception_handler(NoSuggestion)
    async def _handle_422(request: Request, exc: Exception):
        return JSONResponse(status_code=422,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(ClaimConflict)
    @app.exception_handler(ClaimRequired)
    async def _handle_409(request: Request, exc: Exception):
        return JSONResponse(status_code=409,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    # -- read routes

    @app.get("/tagset")
    def get_tagset():
        return {"version": tagset.version,
                "categories": [_tagset_tree(n) for n in tagset.top_level]}

    @app.get("/documents")
    def list_documents(status: str | None = Query(default=None)):
        with store.lock:
            docs = []
            for doc in store.documents.values():
                doc_status = document_status(doc)
                if status and doc_status != status:
                    continue
                docs.append({
                    "doc_id": doc.doc_id,
                    "subcorpus": str(doc.subcorpus),
                    "sentences": len(doc.sentences),
                    "tokens": doc.token_count(),
                    "status": doc_status,
                    "claimed_by": claims.holder(doc.doc_id),
                })
            return docs

    @app.get("/documents/{doc_id}/sentences")
    def get_sentences(doc_id: str, from_: int = Query(default=0, alias="from", ge=0),
                      limit: int = Query(default=50, ge=1, le=500)):
        with store.lock:
            doc = store.document(doc_id)
            window = doc.sentences[from_:from_ + limit]
            return {
                "doc_id": doc_id,
                "total": len(doc.sentences),
                "from": from_,
                "sentences": [s.to_dict() for s in window],
            }

    @app.get("/documents/{doc_id}/progress")
    def get_progress(doc_id: str):
        with store.lock:
            return progress(store, doc_id)

    @app.get("/suggest")
    def get_suggestion(form: str, mode: str = "unambiguous_only", min_count: int = 1):
        if lexicon is None:
            return {"form": form, "suggestion": None, "candidates": {}}
        policy = AutotagPolicy(mode=mode, min_count=min_count)
        return {
            "form": form,
            "suggestion": suggest(lexicon, form, policy),
            "candidates": lexicon.entries.get(form, {}),
        }

    @app.get("/stats")
    def get_stats():
        return store.compute_stats().to_dict()

    @app.get("/export")
    def get_export(format: str = Query(default="tsv")):
        if format == "xml":
            return PlainTextResponse(export_xml(store), media_type="application/xml")
        if format == "tsv":
            with store.lock:
                docs = sorted(store.documents.values(), key=lambda d: d.doc_id)
                body = "\n".join(export_tsv(d) for d in docs)
            return PlainTextResponse(body, media_type="text/tab-separated-values")
        raise _HttpError(422, "UnknownFormat", f"format must be xml or tsv, got {format!r}")

    # -- claim routes

    @app.post("/documents/{doc_id}/claim")
    def claim_document(doc_id: str, annotator: Annotator = Depends(authed)):
        store.document(doc_id)  # 404 before 409
        claim = claims.claim(doc_id, annotator.annotator_id)
        return {"doc_id": doc_id, "annotator_id": claim.annotator_id,
                "state": claim.state.value, "claimed_at": claim.claimed_at}

    @app.post("/documents/{doc_id}/release")
    def release_document(doc_id: str, body: ReleaseBody | None = None,
                         annotator: Annotator = Depends(authed)):
        store.document(doc_id)
        claim = claims.release(doc_id, annotator.annotator_id,
                               finished=bool(body and body.finished))
        return {"doc_id": doc_id, "state": claim.state.value}

    # -- write routes (token + active claim on the enclosing document)

    def require_claim(doc_id: str, annotator: Annotator) -> None:
        claims.touch(doc_id, annotator.annotator_id)

    @app.put("/sentences/{sentence_id}/tokens/{index}/tag")
    def put_tag(sentence_id: str, index: int, body: TagBody,
                annotator: Annotator = Depends(authed)):
        doc = store.document_of(sentence_id)
        require_claim(doc.doc_id, annotator)
        sent = store.set_tag(sentence_id, index, body.leaf_label, Provenance.MANUAL)
        return {"sentence": sent.to_dict(), "token": sent.tokens[index].to_dict()}

    @app.post("/sentences/{sentence_id}/confirm-all")
    def post_confirm_all(sentence_id: str, annotator: Annotator = Depends(authed)):
        doc = store.document_of(sentence_id)
        require_claim(doc.doc_id, annotator)
        confirmed = confirm_all(store, sentence_id)
        return {"sentence_id": sentence_id, "confirmed": confirmed}

    @app.post("/sentences/{sentence_id}/tokens/{index}/confirm")
    def post_confirm_token(sentence_id: str, index: int,
                           annotator: Annotator = Depends(authed)):
        doc = store.document_of(sentence_id)
        require_claim(doc.doc_id, annotator)
        token = confirm_suggestion(store, sentence_id, index)
        return {"sentence_id": sentence_id, "index": index, "token": token.to_dict()}

    @app.post("/autotag/{doc_id}")
    def post_autotag(doc_id: str, body: PolicyBody | None = None,
                     annotator: Annotator = Depends(authed)):
        store.document(doc_id)
        require_claim(doc_id, annotator)
        if lexicon is None:
            raise _HttpError(422, "NoLexicon", "service started without a lexicon")
        body = body or PolicyBody()
        policy = AutotagPolicy(mode=body.mode, min_count=body.min_count)
        suggested = autotag_document(store, doc_id, lexicon, policy)
        return {"doc_id": doc_id, "suggested": suggested}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="workbench")

    return app

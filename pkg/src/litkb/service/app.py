"""HTTP API (FastAPI) over the pipeline: projects, members, ingestion,
annotation, training, auto-annotation, evaluation, graph queries, retrieval
and QA. All endpoints are versioned under /v1.

Privileges: viewer (read-only), annotator (may edit annotations and run
auto-annotation), owner (may ingest, train, configure schema/members and
build graph/index). Error bodies are ``{code, message, details}``.
"""

from __future__ import annotations

import base64
import io
import zipfile
from typing import Any, Literal

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from litkb.annotation import (
    AnnotationSet,
    ParseError,
    annotation_set_from_dict,
    annotation_set_to_dict,
    apply_revision,
    parse_standoff,
    serialize_standoff,
    validate,
)
from litkb.annotation.export import export_training
from litkb.annotation.model import EntityAnnotation, RelationAnnotation
from litkb.annotation.revision import RevisionError, edit_from_dict
from litkb.autoann import (
    GazetteerRule,
    Hyper,
    auto_annotate,
    evaluate_many,
    load_ner_model,
    load_rc_model,
    regex_annotate,
    save_ner_model,
    save_rc_model,
    train_ner,
    train_rc,
)
from litkb.corpus import ingest_structured
from litkb.corpus.model import Document, document_to_dict
from litkb.graph import PropertyGraph, build_graph, load_file as load_graph_file, persist_file, query_triples
from litkb.ontology import SchemaError, load_schema
from litkb.qa import (
    GenerationParams,
    HttpBackend,
    MockBackend,
    QaError,
    Question,
    answer_to_dict,
    ask,
)
from litkb.retrieval import VectorIndex, default_embedder_id, index_paragraphs, load_index_file, save_index_file
from litkb.service.store import (
    LAYERS,
    ConflictError,
    ServiceConfig,
    Store,
    UnknownIdError,
)

_RANK = {"viewer": 1, "annotator": 2, "owner": 3}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


class CreateProjectBody(BaseModel):
    name: str = Field(min_length=1)


class AddMemberBody(BaseModel):
    user_id: str = Field(min_length=1)
    privilege: Literal["owner", "annotator", "viewer"]


class UploadBody(BaseModel):
    format: Literal["tei-xml", "plain-text"] | None = None
    content: str | None = None
    archive_b64: str | None = None


class SchemaBody(BaseModel):
    entities: list[str] = Field(default_factory=list)
    rules: list[list[str]] = Field(default_factory=list)


class AnnotationsBody(BaseModel):
    entities: list[dict] | None = None
    relations: list[dict] | None = None
    standoff: str | None = None
    para_id: str | None = None


class ReviseBody(BaseModel):
    base_layer: Literal["human", "model", "regex"] = "human"
    edits: list[dict] = Field(default_factory=list)


class TrainBody(BaseModel):
    documents: list[str] = Field(default_factory=list)  # empty = all
    target: Literal["ner", "rc"]
    hyper: dict = Field(default_factory=dict)


class AutoAnnotateBody(BaseModel):
    documents: list[str] = Field(default_factory=list)
    mode: Literal["model", "regex"] = "model"
    ner_version: str | None = None
    rc_version: str | None = None
    rules: list[dict] = Field(default_factory=list)


class EvaluateBody(BaseModel):
    documents: list[str] = Field(default_factory=list)
    pred_layer: Literal["human", "model", "regex"] = "model"
    gold_layer: Literal["human", "model", "regex"] = "human"


class AskBody(BaseModel):
    text: str = Field(min_length=1)
    model_id: str = "mock"
    max_tokens: int = 256
    temperature: float = 0.0


def create_app(config: ServiceConfig) -> FastAPI:
    store = Store(config)
    app = FastAPI(title="litkb", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation_error",
                "message": "request body validation failed",
                "details": exc.errors(),
            },
        )

    def current_user(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "unauthenticated", "missing bearer token")
        user = store.user_for_token(authorization[len("Bearer "):])
        if user is None:
            raise ApiError(401, "unauthenticated", "unknown token")
        return user

    def require(project_id: str, user: str, minimum: str) -> str:
        if not store.project_exists(project_id):
            raise ApiError(404, "unknown_project", f"unknown project {project_id!r}")
        privilege = store.privilege(project_id, user)
        if privilege is None or _RANK[privilege] < _RANK[minimum]:
            raise ApiError(
                403, "forbidden", f"requires {minimum} privilege on this project"
            )
        return privilege

    def writable(project_id: str) -> None:
        try:
            store.check_writable(project_id)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc

    def get_doc(project_id: str, doc_id: str) -> Document:
        try:
            return store.get_document(project_id, doc_id)
        except UnknownIdError as exc:
            raise ApiError(404, "unknown_document", str(exc)) from exc

    # -- projects ---------------------------------------------------------

    @app.post("/v1/projects", status_code=201)
    def create_project(body: CreateProjectBody, user: str = Depends(current_user)):
        try:
            project_id = store.create_project(body.name, user)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"project_id": project_id, "name": body.name, "owner": user}

    @app.get("/v1/projects")
    def list_projects(user: str = Depends(current_user)):
        return {"projects": store.list_projects(user)}

    @app.post("/v1/projects/{project_id}/members", status_code=201)
    def add_member(
        project_id: str, body: AddMemberBody, user: str = Depends(current_user)
    ):
        require(project_id, user, "owner")
        store.add_member(project_id, body.user_id, body.privilege, user)
        return {"members": store.members(project_id)}

    @app.get("/v1/projects/{project_id}/members")
    def get_members(project_id: str, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        return {"members": store.members(project_id)}

    # -- documents ----------------------------------------------------------

    def _payloads_from_upload(body: UploadBody) -> list[tuple[str, str]]:
        if body.archive_b64 is not None:
            try:
                raw = base64.b64decode(body.archive_b64)
                archive = zipfile.ZipFile(io.BytesIO(raw))
            except Exception as exc:
                raise ApiError(422, "bad_archive", f"unreadable zip archive: {exc}") from exc
            payloads = []
            for name in sorted(archive.namelist()):
                if name.endswith("/"):
                    continue
                content = archive.read(name).decode("utf-8")
                fmt = "tei-xml" if name.lower().endswith(".xml") else "plain-text"
                payloads.append((content, fmt))
            if not payloads:
                raise ApiError(422, "bad_archive", "archive contains no documents")
            return payloads
        if body.content is None or body.format is None:
            raise ApiError(
                422, "bad_upload", "provide either content+format or archive_b64"
            )
        return [(body.content, body.format)]

    @app.post("/v1/projects/{project_id}/documents", status_code=202)
    def upload_documents(
        project_id: str, body: UploadBody, user: str = Depends(current_user)
    ):
        require(project_id, user, "owner")
        payloads = _payloads_from_upload(body)

        def work() -> str:
            docs = [ingest_structured(content, fmt) for content, fmt in payloads]
            added = store.append_documents(project_id, docs)
            return f"ingested {len(added)} documents: {', '.join(added)}"

        try:
            job_id = store.submit_job(project_id, "ingest", user, work)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"job_id": job_id}

    @app.get("/v1/projects/{project_id}/documents")
    def list_documents(project_id: str, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        docs = store.load_project_corpus(project_id)
        return {
            "documents": [
                {
                    "doc_id": d.doc_id,
                    "title": d.metadata.title,
                    "paragraphs": len(d.paragraphs),
                }
                for d in docs
            ]
        }

    @app.get("/v1/projects/{project_id}/documents/{doc_id}/paragraphs")
    def get_paragraphs(project_id: str, doc_id: str, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        doc = get_doc(project_id, doc_id)
        return {"doc_id": doc.doc_id, "paragraphs": document_to_dict(doc)["paragraphs"]}

    # -- schema ---------------------------------------------------------------

    @app.get("/v1/projects/{project_id}/schema")
    def get_schema(project_id: str, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        schema = store.load_project_schema(project_id)
        return {
            "entities": sorted(schema.entity_types),
            "rules": [list(r) for r in sorted(schema.relation_rules)],
        }

    @app.put("/v1/projects/{project_id}/schema")
    def put_schema(
        project_id: str, body: SchemaBody, user: str = Depends(current_user)
    ):
        require(project_id, user, "owner")
        writable(project_id)
        try:
            schema = load_schema({"entities": body.entities, "rules": body.rules})
        except SchemaError as exc:
            raise ApiError(422, "bad_schema", str(exc)) from exc
        with store.project_lock(project_id):
            store.save_project_schema(project_id, schema)
        return {
            "entities": sorted(schema.entity_types),
            "rules": [list(r) for r in sorted(schema.relation_rules)],
        }

    # -- annotations -------------------------------------------------------------

    def _corpus_violations(annset: AnnotationSet, doc: Document) -> list[dict]:
        problems = []
        sent_of: dict[str, str] = {}
        for ent in annset.entities:
            try:
                para = doc.paragraph(ent.para_id)
            except KeyError:
                problems.append(
                    {"ann_id": ent.ann_id, "kind": "unknown_paragraph",
                     "message": f"{ent.ann_id}: unknown paragraph {ent.para_id!r}"}
                )
                continue
            if not (0 <= ent.start < ent.end <= len(para.text)):
                problems.append(
                    {"ann_id": ent.ann_id, "kind": "bad_span",
                     "message": f"{ent.ann_id}: span outside paragraph"}
                )
                continue
            if para.text[ent.start:ent.end] != ent.surface:
                problems.append(
                    {"ann_id": ent.ann_id, "kind": "surface_mismatch",
                     "message": f"{ent.ann_id}: surface does not match paragraph slice"}
                )
            owner = next(
                (s for s in para.sentences if s.start <= ent.start and ent.end <= s.end),
                None,
            )
            if owner is not None:
                sent_of[ent.ann_id] = owner.sent_id
        for rel in annset.relations:
            s1, s2 = sent_of.get(rel.arg1), sent_of.get(rel.arg2)
            if s1 is None or s2 is None or s1 != s2:
                problems.append(
                    {"ann_id": rel.ann_id, "kind": "cross_sentence_relation",
                     "message": f"{rel.ann_id}: arguments are not in the same sentence"}
                )
        return problems

    def _validate_or_422(annset: AnnotationSet, project_id: str, doc: Document) -> None:
        schema = store.load_project_schema(project_id)
        report = validate(annset, schema)
        problems = report.to_dicts() + _corpus_violations(annset, doc)
        if problems:
            raise ApiError(
                422, "annotation_validation", "annotations violate the schema or corpus",
                details=problems,
            )

    def _force_provenance(annset: AnnotationSet, provenance: str) -> AnnotationSet:
        return AnnotationSet(
            doc_id=annset.doc_id,
            entities=tuple(
                EntityAnnotation(
                    ann_id=e.ann_id, entity_type=e.entity_type, para_id=e.para_id,
                    start=e.start, end=e.end, surface=e.surface, provenance=provenance,
                )
                for e in annset.entities
            ),
            relations=tuple(
                RelationAnnotation(
                    ann_id=r.ann_id, relation_type=r.relation_type,
                    arg1=r.arg1, arg2=r.arg2, provenance=provenance,
                )
                for r in annset.relations
            ),
        )

    @app.get("/v1/projects/{project_id}/documents/{doc_id}/annotations")
    def get_annotations(
        project_id: str,
        doc_id: str,
        layer: str = Query(default="human"),
        format: str = Query(default="json"),
        para_id: str | None = Query(default=None),
        user: str = Depends(current_user),
    ):
        require(project_id, user, "viewer")
        get_doc(project_id, doc_id)
        if layer not in LAYERS:
            raise ApiError(422, "bad_layer", f"unknown layer {layer!r}")
        annset = store.load_annotations(project_id, doc_id, layer)
        if annset is None:
            annset = AnnotationSet(doc_id=doc_id)
        if format == "standoff":
            if para_id is None:
                raise ApiError(422, "bad_request", "standoff format needs para_id")
            fragment = _paragraph_fragment(annset, para_id)
            return PlainTextResponse(serialize_standoff(fragment))
        return annotation_set_to_dict(annset)

    @app.put("/v1/projects/{project_id}/documents/{doc_id}/annotations")
    def put_annotations(
        project_id: str,
        doc_id: str,
        body: AnnotationsBody,
        user: str = Depends(current_user),
    ):
        require(project_id, user, "annotator")
        writable(project_id)
        doc = get_doc(project_id, doc_id)
        if body.standoff is not None:
            if not body.para_id:
                raise ApiError(422, "bad_request", "standoff body needs para_id")
            try:
                para = doc.paragraph(body.para_id)
            except KeyError as exc:
                raise ApiError(404, "unknown_paragraph", str(exc)) from exc
            try:
                fragment = parse_standoff(
                    body.standoff, para.text, doc_id=doc_id, para_id=body.para_id
                )
            except ParseError as exc:
                raise ApiError(422, "bad_standoff", str(exc)) from exc
            existing = store.load_annotations(project_id, doc_id, "human")
            annset = _replace_paragraph(existing, fragment, doc_id, body.para_id)
        else:
            try:
                annset = annotation_set_from_dict(
                    {
                        "doc_id": doc_id,
                        "entities": body.entities or [],
                        "relations": body.relations or [],
                    }
                )
            except (ValueError, KeyError) as exc:
                raise ApiError(422, "bad_annotations", str(exc)) from exc
        annset = _force_provenance(annset, "human")
        _validate_or_422(annset, project_id, doc)
        with store.project_lock(project_id):
            store.save_annotations(project_id, doc_id, "human", annset, user)
        return annotation_set_to_dict(annset)

    @app.post("/v1/projects/{project_id}/documents/{doc_id}/annotations/revise")
    def revise_annotations(
        project_id: str,
        doc_id: str,
        body: ReviseBody,
        user: str = Depends(current_user),
    ):
        require(project_id, user, "annotator")
        writable(project_id)
        doc = get_doc(project_id, doc_id)
        base = store.load_annotations(project_id, doc_id, body.base_layer)
        if base is None:
            base = AnnotationSet(doc_id=doc_id)
        try:
            edits = [edit_from_dict(e) for e in body.edits]
            revised = apply_revision(base, edits)
        except RevisionError as exc:
            raise ApiError(422, "bad_revision", str(exc)) from exc
        _validate_or_422(revised, project_id, doc)
        with store.project_lock(project_id):
            store.save_annotations(project_id, doc_id, "human", revised, user)
        return annotation_set_to_dict(revised)

    # -- training and auto-annotation ------------------------------------------

    def _selected_docs(project_id: str, doc_ids: list[str]) -> list[Document]:
        corpus = store.load_project_corpus(project_id)
        if not doc_ids:
            return corpus
        by_id = {d.doc_id: d for d in corpus}
        missing = [d for d in doc_ids if d not in by_id]
        if missing:
            raise ApiError(404, "unknown_document", f"unknown documents: {missing}")
        return [by_id[d] for d in doc_ids]

    @app.post("/v1/projects/{project_id}/train", status_code=202)
    def train(project_id: str, body: TrainBody, user: str = Depends(current_user)):
        require(project_id, user, "owner")
        docs = _selected_docs(project_id, body.documents)
        hyper_fields = Hyper().to_dict()
        hyper_fields.update(body.hyper)
        try:
            hyper = Hyper.from_dict(hyper_fields)
        except (KeyError, ValueError) as exc:
            raise ApiError(422, "bad_hyper", f"bad hyperparameters: {exc}") from exc
        target = body.target

        def work() -> str:
            schema = store.load_project_schema(project_id)
            sets = []
            for doc in docs:
                annset = store.load_annotations(project_id, doc.doc_id, "human")
                if annset is not None:
                    sets.append(annset)
            result = export_training(docs, sets)
            if target == "ner":
                model = train_ner(result.records, hyper)
                version = store.next_model_version(project_id, "ner")
                save_ner_model(model, str(store.model_path(project_id, "ner", version)))
            else:
                model = train_rc(result.records, schema, hyper)
                version = store.next_model_version(project_id, "rc")
                save_rc_model(model, str(store.model_path(project_id, "rc", version)))
            warn = f"; {len(result.warnings)} export warnings" if result.warnings else ""
            return f"trained {target} {version} on {len(result.records)} records{warn}"

        try:
            job_id = store.submit_job(project_id, f"train_{target}", user, work)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"job_id": job_id}

    @app.post("/v1/projects/{project_id}/auto-annotate", status_code=202)
    def auto_annotate_endpoint(
        project_id: str, body: AutoAnnotateBody, user: str = Depends(current_user)
    ):
        require(project_id, user, "annotator")
        docs = _selected_docs(project_id, body.documents)
        mode = body.mode

        if mode == "regex":
            try:
                rules = [
                    GazetteerRule(
                        pattern=r["pattern"],
                        entity_type=r["entity_type"],
                        case_sensitive=bool(r.get("case_sensitive", True)),
                    )
                    for r in body.rules
                ]
            except (KeyError, ValueError) as exc:
                raise ApiError(422, "bad_rules", str(exc)) from exc
            if not rules:
                raise ApiError(422, "bad_rules", "regex mode needs at least one rule")

            def work() -> str:
                total = 0
                for doc in docs:
                    annset = regex_annotate(doc, rules)
                    store.save_annotations(project_id, doc.doc_id, "regex", annset, user)
                    total += len(annset.entities)
                return f"regex-annotated {len(docs)} documents, {total} entities"

        else:
            ner_version = body.ner_version or store.latest_model_version(project_id, "ner")
            rc_version = body.rc_version or store.latest_model_version(project_id, "rc")
            if ner_version is None or rc_version is None:
                raise ApiError(422, "no_model", "train ner and rc models first")
            ner_path = store.model_path(project_id, "ner", ner_version)
            rc_path = store.model_path(project_id, "rc", rc_version)
            if not ner_path.exists() or not rc_path.exists():
                raise ApiError(404, "unknown_model", "requested model version not found")

            def work() -> str:
                schema = store.load_project_schema(project_id)
                ner = load_ner_model(str(ner_path))
                rc = load_rc_model(str(rc_path))
                total = 0
                for doc in docs:
                    annset = auto_annotate(doc, ner, rc, schema)
                    store.save_annotations(project_id, doc.doc_id, "model", annset, user)
                    total += len(annset.entities)
                return (
                    f"auto-annotated {len(docs)} documents with ner-{ner_version}/"
                    f"rc-{rc_version}, {total} entities"
                )

        try:
            job_id = store.submit_job(project_id, "auto_annotate", user, work)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"job_id": job_id}

    @app.post("/v1/projects/{project_id}/evaluate")
    def evaluate(project_id: str, body: EvaluateBody, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        docs = _selected_docs(project_id, body.documents)
        pairs = []
        for doc in docs:
            pred = store.load_annotations(project_id, doc.doc_id, body.pred_layer)
            gold = store.load_annotations(project_id, doc.doc_id, body.gold_layer)
            pairs.append(
                (
                    pred if pred is not None else AnnotationSet(doc_id=doc.doc_id),
                    gold if gold is not None else AnnotationSet(doc_id=doc.doc_id),
                )
            )
        return evaluate_many(pairs).to_dict()

    # -- graph and index -----------------------------------------------------

    @app.post("/v1/projects/{project_id}/graph/build", status_code=202)
    def graph_build(project_id: str, user: str = Depends(current_user)):
        require(project_id, user, "owner")

        def work() -> str:
            corpus = store.load_project_corpus(project_id)
            sets = store.all_annotation_sets(project_id)
            graph = build_graph(corpus, sets)
            persist_file(graph, str(store.graph_path(project_id)))
            return f"graph built: {len(graph.nodes)} nodes, {len(graph.edges)} edges"

        try:
            job_id = store.submit_job(project_id, "build_graph", user, work)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"job_id": job_id}

    @app.post("/v1/projects/{project_id}/index/build", status_code=202)
    def index_build(project_id: str, user: str = Depends(current_user)):
        require(project_id, user, "owner")

        def work() -> str:
            corpus = store.load_project_corpus(project_id)
            index = index_paragraphs(corpus)
            save_index_file(index, str(store.index_path(project_id)))
            return f"index built: {len(index.entries)} paragraphs"

        try:
            job_id = store.submit_job(project_id, "build_index", user, work)
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        return {"job_id": job_id}

    @app.get("/v1/projects/{project_id}/graph/triples")
    def graph_triples(
        project_id: str,
        head_type: str | None = Query(default=None),
        relation: str | None = Query(default=None),
        tail_type: str | None = Query(default=None),
        user: str = Depends(current_user),
    ):
        require(project_id, user, "viewer")
        graph = _load_graph(project_id)
        triples = query_triples(
            graph, head_type=head_type, relation=relation, tail_type=tail_type
        )
        return {
            "triples": [
                {
                    "head": {
                        "node_id": h.node_id,
                        "surface": h.prop("surface"),
                        "entity_type": h.prop("entity_type"),
                    },
                    "relation": rel,
                    "tail": {
                        "node_id": t.node_id,
                        "surface": t.prop("surface"),
                        "entity_type": t.prop("entity_type"),
                    },
                }
                for h, rel, t in triples
            ]
        }

    def _load_graph(project_id: str) -> PropertyGraph:
        path = store.graph_path(project_id)
        if not path.exists():
            return PropertyGraph()
        return load_graph_file(str(path))

    def _load_index(project_id: str) -> VectorIndex:
        path = store.index_path(project_id)
        if not path.exists():
            return VectorIndex(dim=256, embedder_id=default_embedder_id(256))
        return load_index_file(str(path))

    # -- QA ----------------------------------------------------------------------

    @app.post("/v1/projects/{project_id}/ask")
    def ask_endpoint(project_id: str, body: AskBody, user: str = Depends(current_user)):
        require(project_id, user, "viewer")
        index = _load_index(project_id)
        graph = _load_graph(project_id)
        backend = MockBackend() if body.model_id == "mock" else HttpBackend()
        question = Question(
            text=body.text,
            project_id=project_id,
            params=GenerationParams(
                model_id=body.model_id,
                max_tokens=body.max_tokens,
                temperature=body.temperature,
            ),
        )
        try:
            answer = ask(question, index, graph, backend)
        except KeyError as exc:
            # index has paragraphs the graph lacks: grounding is impossible
            raise ApiError(
                422, "graph_not_built", f"build the graph before asking: {exc}"
            ) from exc
        except QaError as exc:
            raise ApiError(
                502,
                "generation_failed",
                str(exc),
                details=answer_to_dict(exc.partial),
            ) from exc
        return answer_to_dict(answer)

    # -- jobs -----------------------------------------------------------------------

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str, user: str = Depends(current_user)):
        try:
            job = store.get_job(job_id)
        except UnknownIdError as exc:
            raise ApiError(404, "unknown_job", str(exc)) from exc
        require(job.project_id, user, "viewer")
        return {
            "job_id": job.job_id,
            "project_id": job.project_id,
            "kind": job.kind,
            "state": job.state,
            "log": job.log,
        }

    return app


def _paragraph_fragment(annset: AnnotationSet, para_id: str) -> AnnotationSet:
    entities = tuple(e for e in annset.entities if e.para_id == para_id)
    kept = {e.ann_id for e in entities}
    relations = tuple(
        r for r in annset.relations if r.arg1 in kept and r.arg2 in kept
    )
    return AnnotationSet(doc_id=annset.doc_id, entities=entities, relations=relations)


def _replace_paragraph(
    existing: AnnotationSet | None,
    fragment: AnnotationSet,
    doc_id: str,
    para_id: str,
) -> AnnotationSet:
    """Replace one paragraph's annotations inside a document-level set."""
    if existing is None:
        existing = AnnotationSet(doc_id=doc_id)
    keep_entities = [e for e in existing.entities if e.para_id != para_id]
    keep_ids = {e.ann_id for e in keep_entities}
    keep_relations = [
        r for r in existing.relations if r.arg1 in keep_ids and r.arg2 in keep_ids
    ]
    next_t = max((int(e.ann_id[1:]) for e in keep_entities), default=0) + 1
    next_r = max((int(r.ann_id[1:]) for r in keep_relations), default=0) + 1
    rename: dict[str, str] = {}
    new_entities = []
    for ent in fragment.entities:
        new_id = f"T{next_t}"
        next_t += 1
        rename[ent.ann_id] = new_id
        new_entities.append(
            EntityAnnotation(
                ann_id=new_id, entity_type=ent.entity_type, para_id=ent.para_id,
                start=ent.start, end=ent.end, surface=ent.surface,
                provenance=ent.provenance,
            )
        )
    new_relations = []
    for rel in fragment.relations:
        new_relations.append(
            RelationAnnotation(
                ann_id=f"R{next_r}", relation_type=rel.relation_type,
                arg1=rename[rel.arg1], arg2=rename[rel.arg2], provenance=rel.provenance,
            )
        )
        next_r += 1
    return AnnotationSet(
        doc_id=doc_id,
        entities=tuple(keep_entities + new_entities),
        relations=tuple(keep_relations + new_relations),
    )

"""Embedded store: projects, members and jobs in SQLite; corpus, schema,
annotations, models, graph and index persisted via their module file formats
under a per-project directory.

Layout under ``data_dir``::

    store.db
    projects/<project_id>/corpus.jsonl
    projects/<project_id>/schema.yaml
    projects/<project_id>/annotations/<doc_id>/<layer>.json
    projects/<project_id>/models/ner-v<N>.npz, rc-v<N>.npz
    projects/<project_id>/graph.tsv
    projects/<project_id>/index.tsv

Jobs run on a bounded worker pool; at most one mutation job per project is
active (queued or running) at a time, and synchronous writes are rejected
with a conflict while one is active. Job states only move
queued -> running -> done|failed.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from litkb.annotation import AnnotationSet, annotation_set_from_dict, annotation_set_to_dict
from litkb.corpus.model import Document, load_corpus, save_corpus
from litkb.ontology import OntologySchema, load_schema, serialize_schema

PRIVILEGES = ("owner", "annotator", "viewer")
JOB_KINDS = ("ingest", "train_ner", "train_rc", "auto_annotate", "build_graph", "build_index")
JOB_STATES = ("queued", "running", "done", "failed")
LAYERS = ("human", "model", "regex")

_TRANSITIONS = {("queued", "running"), ("running", "done"), ("running", "failed")}


class StoreError(Exception):
    pass


class ConflictError(Exception):
    """Concurrent mutation conflict (HTTP 409)."""


class UnknownIdError(Exception):
    """Unknown project/document/job id (HTTP 404)."""


@dataclass
class ServiceConfig:
    data_dir: Path
    tokens: dict[str, str] = field(default_factory=dict)  # bearer token -> user_id
    manual_jobs: bool = False  # queue jobs; run only via run_pending() (tests)
    max_workers: int = 2


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    project_id: str
    kind: str
    state: str
    log: str
    created_by: str


class Store:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._db_lock = threading.Lock()
        self._db = sqlite3.connect(
            self.data_dir / "store.db", check_same_thread=False
        )
        self._db.execute("PRAGMA journal_mode=WAL")
        self._init_schema()
        self._project_locks: dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()
        self._pending: list[tuple[str, Callable[[], str]]] = []
        self._executor = (
            None
            if config.manual_jobs
            else ThreadPoolExecutor(max_workers=config.max_workers)
        )

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
        self._db.close()

    def _init_schema(self) -> None:
        with self._db_lock, self._db:
            self._db.executescript(
                """
                CREATE TABLE IF NOT EXISTS projects (
                    project_id TEXT PRIMARY KEY,
                    name TEXT NOT NULL,
                    owner TEXT NOT NULL,
                    created_at REAL NOT NULL
                );
                CREATE TABLE IF NOT EXISTS members (
                    project_id TEXT NOT NULL,
                    user_id TEXT NOT NULL,
                    privilege TEXT NOT NULL,
                    added_by TEXT NOT NULL,
                    added_at REAL NOT NULL,
                    PRIMARY KEY (project_id, user_id)
                );
                CREATE TABLE IF NOT EXISTS jobs (
                    job_id TEXT PRIMARY KEY,
                    project_id TEXT NOT NULL,
                    kind TEXT NOT NULL,
                    state TEXT NOT NULL,
                    log TEXT NOT NULL DEFAULT '',
                    created_by TEXT NOT NULL,
                    created_at REAL NOT NULL,
                    updated_at REAL NOT NULL
                );
                """
            )

    # -- auth -----------------------------------------------------------

    def user_for_token(self, token: str) -> str | None:
        return self.config.tokens.get(token)

    # -- projects and members -------------------------------------------

    def project_lock(self, project_id: str) -> threading.RLock:
        with self._locks_guard:
            return self._project_locks.setdefault(project_id, threading.RLock())

    def project_dir(self, project_id: str) -> Path:
        return self.data_dir / "projects" / project_id

    def create_project(self, name: str, owner: str) -> str:
        with self._db_lock, self._db:
            row = self._db.execute(
                "SELECT 1 FROM projects WHERE name = ? AND owner = ?", (name, owner)
            ).fetchone()
            if row:
                raise ConflictError(f"project name {name!r} already exists for this user")
            project_id = uuid.uuid4().hex[:12]
            now = time.time()
            self._db.execute(
                "INSERT INTO projects VALUES (?, ?, ?, ?)", (project_id, name, owner, now)
            )
            self._db.execute(
                "INSERT INTO members VALUES (?, ?, 'owner', ?, ?)",
                (project_id, owner, owner, now),
            )
        (self.project_dir(project_id) / "annotations").mkdir(parents=True, exist_ok=True)
        (self.project_dir(project_id) / "models").mkdir(parents=True, exist_ok=True)
        return project_id

    def project_exists(self, project_id: str) -> bool:
        with self._db_lock:
            return (
                self._db.execute(
                    "SELECT 1 FROM projects WHERE project_id = ?", (project_id,)
                ).fetchone()
                is not None
            )

    def list_projects(self, user_id: str) -> list[dict]:
        with self._db_lock:
            rows = self._db.execute(
                """
                SELECT p.project_id, p.name, p.owner, m.privilege
                FROM projects p JOIN members m ON p.project_id = m.project_id
                WHERE m.user_id = ? ORDER BY p.created_at
                """,
                (user_id,),
            ).fetchall()
        return [
            {"project_id": r[0], "name": r[1], "owner": r[2], "privilege": r[3]}
            for r in rows
        ]

    def members(self, project_id: str) -> list[dict]:
        with self._db_lock:
            rows = self._db.execute(
                "SELECT user_id, privilege FROM members WHERE project_id = ? ORDER BY user_id",
                (project_id,),
            ).fetchall()
        return [{"user_id": r[0], "privilege": r[1]} for r in rows]

    def add_member(self, project_id: str, user_id: str, privilege: str, added_by: str) -> None:
        if privilege not in PRIVILEGES:
            raise StoreError(f"unknown privilege {privilege!r}")
        with self._db_lock, self._db:
            self._db.execute(
                "INSERT OR REPLACE INTO members VALUES (?, ?, ?, ?, ?)",
                (project_id, user_id, privilege, added_by, time.time()),
            )

    def privilege(self, project_id: str, user_id: str) -> str | None:
        with self._db_lock:
            row = self._db.execute(
                "SELECT privilege FROM members WHERE project_id = ? AND user_id = ?",
                (project_id, user_id),
            ).fetchone()
        return row[0] if row else None

    # -- corpus -----------------------------------------------------------

    def corpus_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "corpus.jsonl"

    def load_project_corpus(self, project_id: str) -> list[Document]:
        path = self.corpus_path(project_id)
        if not path.exists():
            return []
        with open(path, "r", encoding="utf-8") as fp:
            return list(load_corpus(fp))

    def append_documents(self, project_id: str, docs: Iterable[Document]) -> list[str]:
        """Append documents, skipping doc_ids already present (idempotent)."""
        existing = {d.doc_id for d in self.load_project_corpus(project_id)}
        new_docs = [d for d in docs if d.doc_id not in existing]
        seen: set[str] = set()
        unique = []
        for doc in new_docs:
            if doc.doc_id not in seen:
                unique.append(doc)
                seen.add(doc.doc_id)
        if unique:
            with open(self.corpus_path(project_id), "a", encoding="utf-8") as fp:
                save_corpus(unique, fp)
        return [d.doc_id for d in unique]

    def get_document(self, project_id: str, doc_id: str) -> Document:
        for doc in self.load_project_corpus(project_id):
            if doc.doc_id == doc_id:
                return doc
        raise UnknownIdError(f"unknown document {doc_id!r}")

    # -- schema -----------------------------------------------------------

    def schema_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "schema.yaml"

    def load_project_schema(self, project_id: str) -> OntologySchema:
        path = self.schema_path(project_id)
        if not path.exists():
            return OntologySchema(entity_types=frozenset())
        with open(path, "r", encoding="utf-8") as fp:
            return load_schema(fp.read())

    def save_project_schema(self, project_id: str, schema: OntologySchema) -> None:
        self.schema_path(project_id).write_text(serialize_schema(schema), encoding="utf-8")

    # -- annotations --------------------------------------------------------

    def annotations_path(self, project_id: str, doc_id: str, layer: str) -> Path:
        return self.project_dir(project_id) / "annotations" / doc_id / f"{layer}.json"

    def load_annotations(
        self, project_id: str, doc_id: str, layer: str
    ) -> AnnotationSet | None:
        path = self.annotations_path(project_id, doc_id, layer)
        if not path.exists():
            return None
        obj = json.loads(path.read_text(encoding="utf-8"))
        return annotation_set_from_dict(obj)

    def save_annotations(
        self, project_id: str, doc_id: str, layer: str, annset: AnnotationSet, user_id: str
    ) -> None:
        if layer not in LAYERS:
            raise StoreError(f"unknown layer {layer!r}")
        path = self.annotations_path(project_id, doc_id, layer)
        path.parent.mkdir(parents=True, exist_ok=True)
        obj = annotation_set_to_dict(annset)
        obj["updated_by"] = user_id
        obj["updated_at"] = time.time()
        path.write_text(
            json.dumps(obj, ensure_ascii=False, sort_keys=True), encoding="utf-8"
        )

    def all_annotation_sets(self, project_id: str) -> list[AnnotationSet]:
        root = self.project_dir(project_id) / "annotations"
        sets = []
        if root.exists():
            for doc_dir in sorted(root.iterdir()):
                for layer in LAYERS:
                    path = doc_dir / f"{layer}.json"
                    if path.exists():
                        obj = json.loads(path.read_text(encoding="utf-8"))
                        sets.append(annotation_set_from_dict(obj))
        return sets

    # -- models -------------------------------------------------------------

    def models_dir(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "models"

    def next_model_version(self, project_id: str, kind: str) -> str:
        existing = list(self.models_dir(project_id).glob(f"{kind}-v*.npz"))
        return f"v{len(existing) + 1}"

    def model_path(self, project_id: str, kind: str, version: str) -> Path:
        return self.models_dir(project_id) / f"{kind}-{version}.npz"

    def latest_model_version(self, project_id: str, kind: str) -> str | None:
        versions = sorted(
            int(p.stem.split("-v")[-1])
            for p in self.models_dir(project_id).glob(f"{kind}-v*.npz")
        )
        return f"v{versions[-1]}" if versions else None

    # -- graph and index ------------------------------------------------------

    def graph_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "graph.tsv"

    def index_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "index.tsv"

    # -- jobs -----------------------------------------------------------------

    def has_active_mutation_job(self, project_id: str) -> bool:
        with self._db_lock:
            row = self._db.execute(
                "SELECT 1 FROM jobs WHERE project_id = ? AND state IN ('queued', 'running')",
                (project_id,),
            ).fetchone()
        return row is not None

    def check_writable(self, project_id: str) -> None:
        if self.has_active_mutation_job(project_id):
            raise ConflictError("a mutation job is active for this project")

    def submit_job(
        self, project_id: str, kind: str, user_id: str, work: Callable[[], str]
    ) -> str:
        """Queue a mutation job. ``work`` returns the completion log text."""
        if kind not in JOB_KINDS:
            raise StoreError(f"unknown job kind {kind!r}")
        job_id = uuid.uuid4().hex[:12]
        now = time.time()
        with self._db_lock, self._db:
            # active-job check and insert under one lock: no double-submit race
            row = self._db.execute(
                "SELECT 1 FROM jobs WHERE project_id = ? AND state IN ('queued', 'running')",
                (project_id,),
            ).fetchone()
            if row is not None:
                raise ConflictError("a mutation job is active for this project")
            self._db.execute(
                "INSERT INTO jobs VALUES (?, ?, ?, 'queued', '', ?, ?, ?)",
                (job_id, project_id, kind, user_id, now, now),
            )
        runner = self._make_runner(job_id, project_id, work)
        if self._executor is None:
            self._pending.append((job_id, runner))
        else:
            self._executor.submit(runner)
        return job_id

    def _make_runner(
        self, job_id: str, project_id: str, work: Callable[[], str]
    ) -> Callable[[], None]:
        def run() -> None:
            self._transition(job_id, "running")
            try:
                with self.project_lock(project_id):
                    log = work()
            except Exception as exc:  # job failures land in the log
                self._transition(job_id, "failed", log=f"{type(exc).__name__}: {exc}")
            else:
                self._transition(job_id, "done", log=log)

        return run

    def run_pending(self) -> None:
        """Execute queued jobs inline (manual_jobs mode)."""
        pending, self._pending = self._pending, []
        for _, runner in pending:
            runner()

    def _transition(self, job_id: str, state: str, log: str | None = None) -> None:
        with self._db_lock, self._db:
            row = self._db.execute(
                "SELECT state FROM jobs WHERE job_id = ?", (job_id,)
            ).fetchone()
            if row is None:
                raise UnknownIdError(f"unknown job {job_id!r}")
            if (row[0], state) not in _TRANSITIONS:
                raise StoreError(f"illegal job transition {row[0]} -> {state}")
            if log is None:
                self._db.execute(
                    "UPDATE jobs SET state = ?, updated_at = ? WHERE job_id = ?",
                    (state, time.time(), job_id),
                )
            else:
                self._db.execute(
                    "UPDATE jobs SET state = ?, log = ?, updated_at = ? WHERE job_id = ?",
                    (state, log, time.time(), job_id),
                )

    def get_job(self, job_id: str) -> JobRecord:
        with self._db_lock:
            row = self._db.execute(
                "SELECT job_id, project_id, kind, state, log, created_by FROM jobs "
                "WHERE job_id = ?",
                (job_id,),
            ).fetchone()
        if row is None:
            raise UnknownIdError(f"unknown job {job_id!r}")
        return JobRecord(
            job_id=row[0], project_id=row[1], kind=row[2], state=row[3], log=row[4],
            created_by=row[5],
        )

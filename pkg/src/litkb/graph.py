"""In-process property graph over documents, paragraphs, sentences, entities
and predicted relations.

Nodes and edges carry typed kinds. Containment edges (HAS_PARAGRAPH,
HAS_SENTENCE, HAS_ENTITY) form a forest; relation edges are ENTITY -> ENTITY
and are keyed by (kind, src, dst), so rebuilding from the same inputs yields
identical keys. Entity node identity is (sent_id, span, entity_type):
mention-level nodes, no cross-document linking.

Dump format, one record per line (UTF-8, JSON props):

    N\\t<id>\\t<kind>\\t<props>
    E\\t<id>\\t<kind>\\t<src>\\t<dst>
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from litkb.annotation.model import AnnotationSet
from litkb.corpus.model import Document

NODE_KINDS = ("DOCUMENT", "PARAGRAPH", "SENTENCE", "ENTITY")
CONTAINMENT = ("HAS_PARAGRAPH", "HAS_SENTENCE", "HAS_ENTITY")


class BuildError(Exception):
    """Annotation references a sentence the corpus does not contain."""


class QueryError(Exception):
    """Unknown node id in a query."""


class LoadError(Exception):
    """Corrupt graph dump."""


@dataclass(frozen=True)
class Node:
    node_id: str
    kind: str
    props: tuple[tuple[str, object], ...] = ()

    def prop(self, key: str, default=None):
        for k, v in self.props:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class Edge:
    edge_id: str
    kind: str
    src: str
    dst: str


@dataclass
class PropertyGraph:
    nodes: dict[str, Node] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)

    def add_node(self, node: Node) -> None:
        self.nodes[node.node_id] = node

    def add_edge(self, kind: str, src: str, dst: str) -> None:
        if src not in self.nodes or dst not in self.nodes:
            raise BuildError(f"dangling edge {kind} {src} -> {dst}")
        edge_id = f"{kind}::{src}::{dst}"
        self.edges[edge_id] = Edge(edge_id=edge_id, kind=kind, src=src, dst=dst)

    def nodes_of_kind(self, kind: str) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind == kind]

    def structurally_equal(self, other: "PropertyGraph") -> bool:
        return (
            set(self.nodes) == set(other.nodes)
            and all(self.nodes[k] == other.nodes[k] for k in self.nodes)
            and set(self.edges) == set(other.edges)
        )


def _props(**kwargs) -> tuple[tuple[str, object], ...]:
    # sorted so that persist -> load preserves structural equality
    return tuple(sorted((k, v) for k, v in kwargs.items() if v is not None))


def entity_node_id(sent_id: str, start: int, end: int, entity_type: str) -> str:
    return f"ent::{sent_id}::{start}-{end}::{entity_type}"


def build_graph(
    corpus: Sequence[Document], annotation_sets: Iterable[AnnotationSet]
) -> PropertyGraph:
    """One node per document / paragraph / sentence, one ENTITY node per
    distinct (sentence, span, type), one relation edge per annotated triple.

    Duplicate entities across sets (e.g. regex and model) merge into a single
    node with merged provenance. Idempotent on rebuild.
    """
    g = PropertyGraph()
    for doc in corpus:
        g.add_node(
            Node(
                node_id=doc.doc_id,
                kind="DOCUMENT",
                props=_props(
                    title=doc.metadata.title,
                    authors=list(doc.metadata.authors),
                    year=doc.metadata.year,
                ),
            )
        )
        for p_idx, para in enumerate(doc.paragraphs):
            g.add_node(
                Node(
                    node_id=para.para_id,
                    kind="PARAGRAPH",
                    props=_props(text=para.text, index=p_idx, doc_id=doc.doc_id,
                                 section=para.source_section),
                )
            )
            g.add_edge("HAS_PARAGRAPH", doc.doc_id, para.para_id)
            for s_idx, sent in enumerate(para.sentences):
                g.add_node(
                    Node(
                        node_id=sent.sent_id,
                        kind="SENTENCE",
                        props=_props(start=sent.start, end=sent.end, index=s_idx,
                                     para_id=para.para_id),
                    )
                )
                g.add_edge("HAS_SENTENCE", para.para_id, sent.sent_id)

    para_sentences = {
        para.para_id: para.sentences for doc in corpus for para in doc.paragraphs
    }

    entity_provenance: dict[str, set[str]] = {}
    entity_info: dict[str, tuple] = {}
    annotation_node: dict[tuple[str, str], str] = {}  # (doc_id, ann_id) -> node_id
    relation_triples: list[tuple[str, str, str]] = []

    for annset in annotation_sets:
        for ent in annset.entities:
            sentences = para_sentences.get(ent.para_id)
            if sentences is None:
                raise BuildError(f"{ent.ann_id}: unknown paragraph {ent.para_id}")
            owner = next(
                (s for s in sentences if s.start <= ent.start and ent.end <= s.end),
                None,
            )
            if owner is None:
                raise BuildError(
                    f"{ent.ann_id}: span ({ent.start}, {ent.end}) lies in no "
                    f"sentence of {ent.para_id}"
                )
            node_id = entity_node_id(owner.sent_id, ent.start, ent.end, ent.entity_type)
            entity_provenance.setdefault(node_id, set()).add(ent.provenance)
            entity_info[node_id] = (owner.sent_id, ent)
            annotation_node[(annset.doc_id, ent.ann_id)] = node_id
        for rel in annset.relations:
            src = annotation_node[(annset.doc_id, rel.arg1)]
            dst = annotation_node[(annset.doc_id, rel.arg2)]
            relation_triples.append((rel.relation_type, src, dst))

    for node_id in sorted(entity_info):
        sent_id, ent = entity_info[node_id]
        g.add_node(
            Node(
                node_id=node_id,
                kind="ENTITY",
                props=_props(
                    surface=ent.surface,
                    entity_type=ent.entity_type,
                    provenance=sorted(entity_provenance[node_id]),
                    sent_id=sent_id,
                    para_id=ent.para_id,
                    start=ent.start,
                    end=ent.end,
                ),
            )
        )
        g.add_edge("HAS_ENTITY", sent_id, node_id)

    for kind, src, dst in relation_triples:
        g.add_edge(kind, src, dst)
    return g


def subgraph_for_paragraphs(g: PropertyGraph, para_ids: Sequence[str]) -> PropertyGraph:
    """Induced subgraph: the listed paragraphs, their sentences and entities,
    relation edges with both endpoints inside, plus owning document nodes."""
    selected = set(para_ids)
    for pid in selected:
        node = g.nodes.get(pid)
        if node is None or node.kind != "PARAGRAPH":
            raise QueryError(f"unknown paragraph id {pid!r}")

    sub = PropertyGraph()
    kept_docs = set()
    for pid in selected:
        doc_id = g.nodes[pid].prop("doc_id")
        if doc_id and doc_id not in kept_docs:
            sub.add_node(g.nodes[doc_id])
            kept_docs.add(doc_id)
        sub.add_node(g.nodes[pid])

    kept_sentences = set()
    for edge in g.edges.values():
        if edge.kind == "HAS_PARAGRAPH" and edge.dst in selected:
            sub.add_edge(edge.kind, edge.src, edge.dst)
        elif edge.kind == "HAS_SENTENCE" and edge.src in selected:
            sub.add_node(g.nodes[edge.dst])
            kept_sentences.add(edge.dst)
            sub.add_edge(edge.kind, edge.src, edge.dst)
    kept_entities = set()
    for edge in g.edges.values():
        if edge.kind == "HAS_ENTITY" and edge.src in kept_sentences:
            sub.add_node(g.nodes[edge.dst])
            kept_entities.add(edge.dst)
            sub.add_edge(edge.kind, edge.src, edge.dst)
    for edge in g.edges.values():
        if edge.kind not in CONTAINMENT and edge.src in kept_entities and edge.dst in kept_entities:
            sub.add_edge(edge.kind, edge.src, edge.dst)
    return sub


def query_triples(
    g: PropertyGraph,
    head_type: str | None = None,
    relation: str | None = None,
    tail_type: str | None = None,
) -> list[tuple[Node, str, Node]]:
    """All relation edges matching every provided filter field, ordered by
    (document, paragraph, sentence, span) of the head then tail entity."""
    out = []
    for edge in g.edges.values():
        if edge.kind in CONTAINMENT:
            continue
        head = g.nodes[edge.src]
        tail = g.nodes[edge.dst]
        if head_type is not None and head.prop("entity_type") != head_type:
            continue
        if relation is not None and edge.kind != relation:
            continue
        if tail_type is not None and tail.prop("entity_type") != tail_type:
            continue
        out.append((head, edge.kind, tail))

    def sort_key(triple: tuple[Node, str, Node]):
        head, rel, tail = triple
        return _entity_order(g, head) + _entity_order(g, tail) + (rel,)

    out.sort(key=sort_key)
    return out


def _entity_order(g: PropertyGraph, entity: Node) -> tuple:
    para = g.nodes[entity.prop("para_id")]
    sent = g.nodes[entity.prop("sent_id")]
    return (
        para.prop("doc_id"),
        para.prop("index"),
        sent.prop("index"),
        entity.prop("start"),
        entity.prop("end"),
        entity.prop("entity_type"),
    )


def persist(g: PropertyGraph, fp: IO[str]) -> None:
    for node_id in sorted(g.nodes):
        node = g.nodes[node_id]
        props = json.dumps(dict(node.props), ensure_ascii=False, sort_keys=True)
        fp.write(f"N\t{node.node_id}\t{node.kind}\t{props}\n")
    for edge_id in sorted(g.edges):
        edge = g.edges[edge_id]
        fp.write(f"E\t{edge.edge_id}\t{edge.kind}\t{edge.src}\t{edge.dst}\n")


def load(fp: IO[str]) -> PropertyGraph:
    g = PropertyGraph()
    for recno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if parts[0] == "N":
            if len(parts) != 4:
                raise LoadError(f"record {recno}: malformed node record")
            node_id, kind, props_json = parts[1], parts[2], parts[3]
            if kind not in NODE_KINDS:
                raise LoadError(f"record {recno}: unknown node kind {kind!r}")
            try:
                props = json.loads(props_json)
            except ValueError as exc:
                raise LoadError(f"record {recno}: bad props: {exc}") from exc
            g.add_node(Node(node_id=node_id, kind=kind, props=tuple(sorted(props.items()))))
        elif parts[0] == "E":
            if len(parts) != 5:
                raise LoadError(f"record {recno}: malformed edge record")
            _, edge_id, kind, src, dst = parts
            if src not in g.nodes or dst not in g.nodes:
                raise LoadError(f"record {recno}: dangling edge endpoint")
            g.edges[edge_id] = Edge(edge_id=edge_id, kind=kind, src=src, dst=dst)
        else:
            raise LoadError(f"record {recno}: unknown record type {parts[0]!r}")
    return g


def persist_file(g: PropertyGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        persist(g, fp)


def load_file(path: str) -> PropertyGraph:
    with open(path, "r", encoding="utf-8") as fp:
        return load(fp)


def check_invariants(g: PropertyGraph) -> None:
    """No dangling edges; containment edges form a forest."""
    for edge in g.edges.values():
        if edge.src not in g.nodes or edge.dst not in g.nodes:
            raise AssertionError(f"dangling edge {edge.edge_id}")
    for kind, child_kind in (
        ("HAS_PARAGRAPH", "PARAGRAPH"),
        ("HAS_SENTENCE", "SENTENCE"),
        ("HAS_ENTITY", "ENTITY"),
    ):
        indegree: dict[str, int] = {}
        for edge in g.edges.values():
            if edge.kind == kind:
                indegree[edge.dst] = indegree.get(edge.dst, 0) + 1
        for node in g.nodes_of_kind(child_kind):
            if indegree.get(node.node_id, 0) != 1:
                raise AssertionError(
                    f"{node.node_id}: containment in-degree "
                    f"{indegree.get(node.node_id, 0)} via {kind}"
                )

"""Retrieval-augmented QA over an indexed, graphed project.

Retrieves the top-3 paragraphs, prompts the backend once per context and once
for a summary over all contexts, and attaches the contexts' subgraph. The
non-generative pipeline is deterministic; with retrieval results in hand,
generation failures still return the grounding artifacts via QaError.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from litkb.graph import PropertyGraph, subgraph_for_paragraphs
from litkb.qa.backend import GenerationBackend, GenerationParams
from litkb.qa.templates import PromptTemplates, build_prompts, default_templates, prompt_hash
from litkb.retrieval import Embedder, RetrievalHit, VectorIndex, top_k

CONTEXT_COUNT = 3
NO_CONTEXT_MESSAGE = "No relevant context was found in the project documents."


@dataclass(frozen=True)
class Question:
    text: str
    project_id: str = ""
    params: GenerationParams = field(default_factory=GenerationParams)

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("question text must be non-empty")


@dataclass(frozen=True)
class PromptRecord:
    kind: str  # per_context | summary
    para_id: str | None
    template_version: str
    prompt: str
    sha256: str


@dataclass(frozen=True)
class ContextAnswer:
    para_id: str
    answer: str


@dataclass
class Answer:
    summary: str
    per_context: list[ContextAnswer]
    contexts: list[RetrievalHit]
    subgraph: PropertyGraph
    prompt_log: list[PromptRecord]


class QaError(Exception):
    """Backend failure; ``partial`` carries contexts and subgraph."""

    def __init__(self, message: str, partial: Answer):
        super().__init__(message)
        self.partial = partial


def ask(
    question: Question,
    index: VectorIndex,
    graph: PropertyGraph,
    backend: GenerationBackend,
    templates: PromptTemplates | None = None,
    embedder: Embedder | None = None,
) -> Answer:
    templates = templates or default_templates()
    hits = top_k(index, question.text, CONTEXT_COUNT, embedder=embedder)
    if not hits:
        return Answer(
            summary=NO_CONTEXT_MESSAGE,
            per_context=[],
            contexts=[],
            subgraph=PropertyGraph(),
            prompt_log=[],
        )

    texts = [_paragraph_text(graph, hit.para_id) for hit in hits]
    subgraph = subgraph_for_paragraphs(graph, [hit.para_id for hit in hits])
    summary_prompt, per_context_prompts = build_prompts(question.text, texts, templates)

    log = [
        PromptRecord(
            kind="per_context",
            para_id=hit.para_id,
            template_version=templates.version,
            prompt=prompt,
            sha256=prompt_hash(prompt),
        )
        for hit, prompt in zip(hits, per_context_prompts)
    ]
    log.append(
        PromptRecord(
            kind="summary",
            para_id=None,
            template_version=templates.version,
            prompt=summary_prompt,
            sha256=prompt_hash(summary_prompt),
        )
    )

    partial = Answer(
        summary="", per_context=[], contexts=hits, subgraph=subgraph, prompt_log=log
    )
    try:
        per_context = [
            ContextAnswer(para_id=hit.para_id, answer=backend.generate(p, question.params))
            for hit, p in zip(hits, per_context_prompts)
        ]
        summary = backend.generate(summary_prompt, question.params)
    except Exception as exc:
        raise QaError(f"generation failed: {exc}", partial=partial) from exc

    return Answer(
        summary=summary,
        per_context=per_context,
        contexts=hits,
        subgraph=subgraph,
        prompt_log=log,
    )


def _paragraph_text(graph: PropertyGraph, para_id: str) -> str:
    node = graph.nodes.get(para_id)
    if node is None or node.kind != "PARAGRAPH":
        raise KeyError(f"paragraph {para_id!r} not in graph")
    text = node.prop("text")
    if text is None:
        raise KeyError(f"paragraph {para_id!r} carries no text")
    return str(text)


def answer_to_dict(answer: Answer) -> dict:
    """JSON-ready form (the /ask response body)."""
    return {
        "summary": answer.summary,
        "per_context": [
            {"para_id": ca.para_id, "answer": ca.answer} for ca in answer.per_context
        ],
        "contexts": [
            {"para_id": hit.para_id, "score": hit.score} for hit in answer.contexts
        ],
        "subgraph": {
            "nodes": [
                {"node_id": n.node_id, "kind": n.kind, "props": dict(n.props)}
                for _, n in sorted(answer.subgraph.nodes.items())
            ],
            "edges": [
                {"edge_id": e.edge_id, "kind": e.kind, "src": e.src, "dst": e.dst}
                for _, e in sorted(answer.subgraph.edges.items())
            ],
        },
        "prompt_log": [
            {
                "kind": rec.kind,
                "para_id": rec.para_id,
                "template_version": rec.template_version,
                "prompt": rec.prompt,
                "sha256": rec.sha256,
            }
            for rec in answer.prompt_log
        ],
    }


def format_transcript(question: Question, answer: Answer) -> str:
    """Byte-stable plain-text transcript of an Answer (the CLI output)."""
    lines = [f"question: {question.text}"]
    lines.append("contexts:")
    for i, hit in enumerate(answer.contexts, start=1):
        lines.append(f"  {i}. {hit.para_id} score={hit.score:.6f}")
    lines.append("answers:")
    for i, ca in enumerate(answer.per_context, start=1):
        lines.append(f"  {i}. {ca.answer}")
    lines.append(f"summary: {answer.summary}")
    lines.append(
        f"subgraph: nodes={len(answer.subgraph.nodes)} edges={len(answer.subgraph.edges)}"
    )
    return "\n".join(lines) + "\n"

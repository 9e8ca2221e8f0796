"""Versioned prompt templates.

Templates are plain-text files with ``{question}``, ``{context}`` (per-context
template) and ``{context_1}``..``{context_3}`` (summary template)
placeholders. With fewer than three contexts, summary blocks
(double-newline separated) that reference an unused placeholder are dropped
before substitution. Braces in context/question text are inert: only the
placeholders are replaced.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

MAX_CONTEXTS = 3
_PLACEHOLDER_RE = re.compile(r"\{(question|context|context_[123])\}")


@dataclass(frozen=True)
class PromptTemplates:
    version: str
    per_context: str
    summary: str


def default_templates() -> PromptTemplates:
    pkg = resources.files("litkb.qa") / "templates"
    return PromptTemplates(
        version="v1",
        per_context=(pkg / "per_context.v1.txt").read_text(encoding="utf-8"),
        summary=(pkg / "summary.v1.txt").read_text(encoding="utf-8"),
    )


def load_templates(per_context_path: str, summary_path: str, version: str) -> PromptTemplates:
    with open(per_context_path, "r", encoding="utf-8") as fp:
        per_context = fp.read()
    with open(summary_path, "r", encoding="utf-8") as fp:
        summary = fp.read()
    return PromptTemplates(version=version, per_context=per_context, summary=summary)


def _substitute(template: str, mapping: dict[str, str]) -> str:
    return _PLACEHOLDER_RE.sub(lambda m: mapping.get(m.group(1), m.group(0)), template)


def build_prompts(
    question: str, contexts: Sequence[str], templates: PromptTemplates | None = None
) -> tuple[str, list[str]]:
    """Build (summary_prompt, per_context_prompts) for 1..3 contexts.

    Contexts appear in retrieval order; context text is substituted verbatim.
    """
    if not 1 <= len(contexts) <= MAX_CONTEXTS:
        raise ValueError(f"need 1..{MAX_CONTEXTS} contexts, got {len(contexts)}")
    templates = templates or default_templates()

    per_context_prompts = [
        _substitute(templates.per_context, {"question": question, "context": ctx})
        for ctx in contexts
    ]

    blocks = templates.summary.split("\n\n")
    kept = []
    for block in blocks:
        unused = [
            i
            for i in range(len(contexts) + 1, MAX_CONTEXTS + 1)
            if f"{{context_{i}}}" in block
        ]
        if not unused:
            kept.append(block)
    mapping = {"question": question}
    for i, ctx in enumerate(contexts, start=1):
        mapping[f"context_{i}"] = ctx
    summary_prompt = _substitute("\n\n".join(kept), mapping)
    return summary_prompt, per_context_prompts


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()

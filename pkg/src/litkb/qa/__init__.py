"""Retrieval-augmented QA with a pluggable generation backend."""

from litkb.qa.ask import (
    CONTEXT_COUNT,
    NO_CONTEXT_MESSAGE,
    Answer,
    ContextAnswer,
    PromptRecord,
    QaError,
    Question,
    answer_to_dict,
    ask,
    format_transcript,
)
from litkb.qa.backend import (
    BackendError,
    EchoBackend,
    GenerationBackend,
    GenerationParams,
    HttpBackend,
    MockBackend,
)
from litkb.qa.templates import PromptTemplates, build_prompts, default_templates, prompt_hash

__all__ = [
    "Answer",
    "BackendError",
    "CONTEXT_COUNT",
    "ContextAnswer",
    "EchoBackend",
    "GenerationBackend",
    "GenerationParams",
    "HttpBackend",
    "MockBackend",
    "NO_CONTEXT_MESSAGE",
    "PromptRecord",
    "PromptTemplates",
    "QaError",
    "Question",
    "answer_to_dict",
    "ask",
    "build_prompts",
    "default_templates",
    "format_transcript",
    "prompt_hash",
]

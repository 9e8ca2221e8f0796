"""Text-generation backends.

``GenerationBackend`` is the pluggable interface: ``generate(prompt, params)``
returning text, plus a ``backend_id``. Two implementations ship:

- ``HttpBackend``: generic HTTP endpoint, POST ``{model_id, prompt,
  max_tokens, temperature}`` -> ``{"text": ...}``; endpoint URL and bearer
  token come from the environment (LITKB_GEN_ENDPOINT, LITKB_GEN_TOKEN);
  one retry with exponential backoff.
- ``MockBackend``: deterministic offline extractive answerer for tests and
  ``--mock`` runs. It parses the shipped template structure out of the prompt
  (Context blocks and the ``Question:`` line) and returns the context
  sentence with maximal token overlap with the question.
"""

from __future__ import annotations

import os
import re
import time
from dataclasses import dataclass
from typing import Protocol

import requests

from litkb.corpus.segment import segment_sentences

ENDPOINT_ENV = "LITKB_GEN_ENDPOINT"
TOKEN_ENV = "LITKB_GEN_TOKEN"


@dataclass(frozen=True)
class GenerationParams:
    model_id: str = "default"
    max_tokens: int = 256
    temperature: float = 0.0


class GenerationBackend(Protocol):
    backend_id: str

    def generate(self, prompt: str, params: GenerationParams) -> str: ...


class BackendError(Exception):
    """Generation call failed after retry."""


class HttpBackend:
    """Generic HTTP text-generation client."""

    def __init__(
        self,
        endpoint: str | None = None,
        token: str | None = None,
        timeout: float = 30.0,
        backoff: float = 1.0,
    ):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV, "")
        self.token = token if token is not None else os.environ.get(TOKEN_ENV, "")
        if not self.endpoint:
            raise BackendError(
                f"no generation endpoint configured (set {ENDPOINT_ENV})"
            )
        self.timeout = timeout
        self.backoff = backoff
        self.backend_id = f"http:{self.endpoint}"

    def generate(self, prompt: str, params: GenerationParams) -> str:
        body = {
            "model_id": params.model_id,
            "prompt": prompt,
            "max_tokens": params.max_tokens,
            "temperature": params.temperature,
        }
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        last_error: Exception | None = None
        for attempt in range(2):  # one retry
            try:
                resp = requests.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                return str(resp.json()["text"])
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                if attempt == 0:
                    time.sleep(self.backoff * 2**attempt)
        raise BackendError(f"generation request failed: {last_error}")


_CONTEXT_HEADER_RE = re.compile(r"^Context( \d+)?:$")
_WORD_RE = re.compile(r"[a-z0-9]+")


class MockBackend:
    """Offline extractive mock: the context sentence with maximal token
    overlap with the question (ties: earliest sentence of earliest context)."""

    backend_id = "mock-extractive-v1"

    def generate(self, prompt: str, params: GenerationParams) -> str:
        contexts, question = _parse_prompt(prompt)
        question_words = set(_WORD_RE.findall(question.lower()))
        best: tuple[int, int, int] | None = None  # (-overlap, ctx idx, sent idx)
        best_text = ""
        for c_idx, ctx in enumerate(contexts):
            for s_idx, (start, end) in enumerate(segment_sentences(ctx)):
                sentence = ctx[start:end]
                words = set(_WORD_RE.findall(sentence.lower()))
                key = (-len(words & question_words), c_idx, s_idx)
                if best is None or key < best:
                    best = key
                    best_text = sentence
        return best_text


class EchoBackend:
    """Returns the prompt unchanged; useful for template-substitution tests."""

    backend_id = "echo"

    def generate(self, prompt: str, params: GenerationParams) -> str:
        return prompt


def _parse_prompt(prompt: str) -> tuple[list[str], str]:
    """Recover context blocks and the question from a shipped-template prompt."""
    contexts: list[str] = []
    question = ""
    blocks = prompt.split("\n\n")
    for block in blocks:
        lines = block.split("\n")
        if lines and _CONTEXT_HEADER_RE.match(lines[0]):
            contexts.append("\n".join(lines[1:]))
        else:
            for line in lines:
                if line.startswith("Question: "):
                    question = line[len("Question: "):]
    return contexts, question

"""Coarse POS tagging with a pluggable tagger interface.

The default tagger is a deterministic suffix/lexicon heuristic over a 12-tag
coarse (UPOS-style) set. POS is carried metadata; only shape-level signal is
consumed downstream, so a coarse set suffices.
"""

from __future__ import annotations

import string
from typing import Callable, Sequence

POS_TAGS = (
    "ADJ",
    "ADP",
    "ADV",
    "CONJ",
    "DET",
    "NOUN",
    "NUM",
    "PRON",
    "PROPN",
    "PUNCT",
    "VERB",
    "X",
)

PosTagger = Callable[[Sequence[str]], list[str]]

_LEXICON = {
    "DET": {"the", "a", "an", "this", "that", "these", "those", "each", "every", "no"},
    "PRON": {"i", "you", "he", "she", "it", "we", "they", "them", "him", "her", "its",
             "their", "our", "your", "my", "his", "who", "which", "what"},
    "ADP": {"of", "in", "on", "at", "by", "with", "from", "to", "for", "into", "over",
            "under", "between", "through", "during", "against", "within", "without"},
    "CONJ": {"and", "or", "but", "nor", "so", "yet", "because", "although", "while",
             "if", "when", "than"},
    "VERB": {"is", "are", "was", "were", "be", "been", "being", "has", "have", "had",
             "do", "does", "did", "will", "would", "can", "could", "may", "might",
             "shall", "should", "must"},
    "ADV": {"not", "very", "also", "however", "thus", "then", "here", "there"},
}

_WORD_TAG = {word: tag for tag, words in _LEXICON.items() for word in words}
_PUNCT_CHARS = set(string.punctuation)


def heuristic_tagger(tokens: Sequence[str]) -> list[str]:
    """Default rule order: lexicon, -ly, -ing/-ed, capitalized non-initial,
    digits, punctuation, else NOUN."""
    tags = []
    for idx, tok in enumerate(tokens):
        tags.append(_tag_one(tok, initial=idx == 0))
    return tags


def _tag_one(tok: str, initial: bool) -> str:
    lower = tok.lower()
    if lower in _WORD_TAG:
        return _WORD_TAG[lower]
    if len(tok) >= 4:
        if lower.endswith("ly"):
            return "ADV"
        if lower.endswith("ing") or lower.endswith("ed"):
            return "VERB"
    if not initial and tok[:1].isupper():
        return "PROPN"
    if tok[:1].isdigit():
        return "NUM"
    if all(c in _PUNCT_CHARS for c in tok):
        return "PUNCT"
    if not any(c.isalnum() for c in tok):
        return "X"
    return "NOUN"


def pos_tag(tokens: Sequence[str], tagger: PosTagger | None = None) -> list[str]:
    """Tag a sentence's tokens; one tag per token, [] for []."""
    if not tokens:
        return []
    tagger = tagger or heuristic_tagger
    tags = tagger(tokens)
    if len(tags) != len(tokens):
        raise ValueError("tagger returned wrong number of tags")
    return tags

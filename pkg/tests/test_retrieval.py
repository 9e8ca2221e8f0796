from __future__ import annotations

import io
import random

import numpy as np
import pytest

from litkb.retrieval import (
    IndexLoadError,
    IndexMismatchError,
    VectorIndex,
    default_embedder_id,
    embed,
    index_paragraphs,
    load_index,
    save_index,
    top_k,
)
from synth import shape_corpus


class TestEmbed:
    def test_empty_text_zero_vector(self):
        assert np.all(embed("") == 0.0)

    def test_deterministic(self):
        a = embed("lithium cathode materials")
        b = embed("lithium cathode materials")
        assert a.tobytes() == b.tobytes()

    def test_self_similarity(self):
        v = embed("lithium cathode")
        assert abs(float(v @ v) - 1.0) < 1e-12

    def test_unit_norm(self):
        v = embed("some tokens for the norm check")
        assert abs(float(np.linalg.norm(v)) - 1.0) < 1e-12

    def test_dimension(self):
        assert embed("x", dim=64).shape == (64,)


class TestIndex:
    def test_empty_corpus(self):
        index = index_paragraphs([])
        assert index.entries == {}

    def test_one_entry_per_paragraph(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        assert len(index.entries) == len(tiny_doc.paragraphs)

    def test_reindex_idempotent(self, tiny_doc):
        a = index_paragraphs([tiny_doc])
        b = index_paragraphs([tiny_doc])
        assert set(a.entries) == set(b.entries)
        for k in a.entries:
            assert a.entries[k].tobytes() == b.entries[k].tobytes()

    def test_merge_dimension_mismatch(self):
        a = VectorIndex(dim=64, embedder_id=default_embedder_id(64))
        b = VectorIndex(dim=128, embedder_id=default_embedder_id(128))
        with pytest.raises(IndexMismatchError):
            a.merge(b)

    def test_add_wrong_dimension(self):
        a = VectorIndex(dim=64, embedder_id=default_embedder_id(64))
        with pytest.raises(IndexMismatchError):
            a.add("p", np.zeros(65))


class TestTopK:
    def test_self_query_ranks_first(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        text = tiny_doc.paragraphs[0].text
        hits = top_k(index, text, 1)
        assert hits[0].para_id == tiny_doc.paragraphs[0].para_id
        assert abs(hits[0].score - 1.0) < 1e-6

    def test_k_larger_than_index(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        assert len(top_k(index, "anything", 50)) == len(tiny_doc.paragraphs)

    def test_empty_index(self):
        index = VectorIndex(dim=256, embedder_id=default_embedder_id(256))
        assert top_k(index, "x", 3) == []

    def test_bad_k(self, tiny_doc):
        with pytest.raises(ValueError):
            top_k(index_paragraphs([tiny_doc]), "x", 0)

    def test_oracle_equivalence_and_prefix(self):
        docs = [shape_corpus(seed=s, n_paragraphs=4) for s in range(6)]
        index = index_paragraphs(docs)
        rng = random.Random(5)
        ids = sorted(index.entries)
        for _ in range(25):
            query = " ".join(rng.choice("alpha beta gamma flow rate cell dry".split())
                             for _ in range(rng.randint(1, 5)))
            q = embed(query)
            # independent oracle: brute-force cosine over every entry
            scored = sorted(
                ((float(index.entries[pid] @ q), pid) for pid in ids),
                key=lambda t: (-t[0], t[1]),
            )
            for k in (1, 3, 7):
                hits = top_k(index, query, k)
                assert [(h.para_id, round(h.score, 12)) for h in hits] == [
                    (pid, round(s, 12)) for s, pid in scored[:k]
                ]
            # monotonicity: top_{k+1} extends top_k
            k3 = top_k(index, query, 3)
            k4 = top_k(index, query, 4)
            assert k4[:3] == k3

    def test_scores_in_bounds(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        for hit in top_k(index, "capacity voltage", 10):
            assert -1.0 - 1e-12 <= hit.score <= 1.0 + 1e-12


class TestDump:
    def test_roundtrip(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        buf = io.StringIO()
        save_index(index, buf)
        buf.seek(0)
        loaded = load_index(buf)
        assert loaded.dim == index.dim
        assert loaded.embedder_id == index.embedder_id
        assert set(loaded.entries) == set(index.entries)
        for pid in index.entries:
            assert loaded.entries[pid].tobytes() == index.entries[pid].tobytes()

    def test_bad_header(self):
        with pytest.raises(IndexLoadError):
            load_index(io.StringIO("not a header\n"))

    def test_truncated_entry(self, tiny_doc):
        index = index_paragraphs([tiny_doc])
        buf = io.StringIO()
        save_index(index, buf)
        lines = buf.getvalue().splitlines()
        body = lines[1].split("\t")
        lines[1] = body[0] + "\t" + " ".join(body[1].split()[:-3])
        with pytest.raises(IndexLoadError, match="record 2"):
            load_index(io.StringIO("\n".join(lines)))

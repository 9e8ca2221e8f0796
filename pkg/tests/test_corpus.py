from __future__ import annotations

import io

import pytest

from litkb.corpus import (
    IngestError,
    ingest_structured,
    load_corpus,
    pos_tag,
    save_corpus,
    segment_sentences,
    tokenize,
)

TEI = """\
<TEI xmlns="http://www.tei-c.org/ns/1.0">
  <teiHeader>
    <fileDesc>
      <titleStmt><title>Cathode materials</title></titleStmt>
      <sourceDesc>
        <biblStruct>
          <analytic>
            <author><persName><forename>A.</forename> <surname>Researcher</surname></persName></author>
          </analytic>
          <monogr><imprint><date when="2021-03-01"/></imprint></monogr>
        </biblStruct>
      </sourceDesc>
    </fileDesc>
  </teiHeader>
  <text>
    <body>
      <div>
        <head>Introduction</head>
        <p>First paragraph about cathodes.</p>
        <p>Second paragraph about anodes.</p>
      </div>
      <figure><head>Figure 1</head><figDesc><p>A caption that must not appear.</p></figDesc></figure>
      <div>
        <p>Third paragraph about cells.</p>
      </div>
    </body>
  </text>
</TEI>
"""


class TestIngest:
    def test_plain_text_blank_line_split(self):
        doc = ingest_structured("A.\n\nB.", "plain-text")
        assert len(doc.paragraphs) == 2
        assert doc.paragraphs[0].text == "A."
        assert doc.paragraphs[1].text == "B."

    def test_tei_paragraphs_in_order(self):
        doc = ingest_structured(TEI, "tei-xml")
        texts = [p.text for p in doc.paragraphs]
        assert texts == [
            "First paragraph about cathodes.",
            "Second paragraph about anodes.",
            "Third paragraph about cells.",
        ]

    def test_tei_figure_caption_excluded(self):
        doc = ingest_structured(TEI, "tei-xml")
        assert not any("caption" in p.text for p in doc.paragraphs)

    def test_tei_metadata(self):
        doc = ingest_structured(TEI, "tei-xml")
        assert doc.metadata.title == "Cathode materials"
        assert doc.metadata.authors == ("A. Researcher",)
        assert doc.metadata.year == 2021

    def test_tei_section_heading(self):
        doc = ingest_structured(TEI, "tei-xml")
        assert doc.paragraphs[0].source_section == "Introduction"

    def test_malformed_xml_reports_byte_position(self):
        with pytest.raises(IngestError, match="byte"):
            ingest_structured("<TEI><body><p>unclosed</body></TEI>", "tei-xml")

    def test_empty_body(self):
        with pytest.raises(IngestError, match="body"):
            ingest_structured("<TEI><text><body></body></text></TEI>", "tei-xml")

    def test_empty_plain_text(self):
        with pytest.raises(IngestError):
            ingest_structured("   \n\n  ", "plain-text")

    def test_deterministic_ids(self):
        a = ingest_structured("A.\n\nB.", "plain-text")
        b = ingest_structured("A.\n\nB.", "plain-text")
        assert a.doc_id == b.doc_id
        assert [p.para_id for p in a.paragraphs] == [p.para_id for p in b.paragraphs]

    def test_offset_integrity(self, tiny_doc):
        tiny_doc.check_offsets()

    def test_unknown_format(self):
        with pytest.raises(IngestError):
            ingest_structured("x", "markdown")


class TestSegment:
    def test_empty(self):
        assert segment_sentences("") == []
        assert segment_sentences("   ") == []

    def test_two_sentences(self):
        assert segment_sentences("Hi. Bye.") == [(0, 3), (4, 8)]

    def test_number_not_split(self):
        spans = segment_sentences("pH 3.5 works. Done.")
        assert len(spans) == 2
        assert spans[0] == (0, 13)

    def test_abbreviation_guard(self):
        spans = segment_sentences("J. Smith agrees. All good.")
        assert len(spans) == 2

    def test_no_terminal_punctuation(self):
        assert segment_sentences("  no terminal here  ") == [(2, 18)]

    def test_reconstruction(self):
        text = "One thing. Another thing! Third? And more."
        spans = segment_sentences(text)
        rebuilt = "".join(
            text[a:b] + (" " * (spans[i + 1][0] - b) if i + 1 < len(spans) else "")
            for i, (a, b) in enumerate(spans)
        )
        assert rebuilt == text.strip()


class TestTokenize:
    def test_whitespace_split(self):
        assert [(0, 1), (2, 3)] == tokenize("a b")

    def test_hyphenated_kept_whole(self):
        text = "LiFePO4-based cathode."
        surfaces = [text[a:b] for a, b in tokenize(text)]
        assert surfaces == ["LiFePO4-based", "cathode", "."]

    def test_bracket_peeling(self):
        text = "(x)"
        surfaces = [text[a:b] for a, b in tokenize(text)]
        assert surfaces == ["(", "x", ")"]

    def test_offset_shift(self):
        assert tokenize("a b", offset=10) == [(10, 11), (12, 13)]

    def test_covers_all_nonspace(self):
        text = "a (b-c), d. e!"
        spans = tokenize(text)
        covered = set()
        for a, b in spans:
            covered.update(range(a, b))
        expected = {i for i, c in enumerate(text) if not c.isspace()}
        assert covered == expected


class TestPos:
    def test_empty(self):
        assert pos_tag([]) == []

    def test_default_rules(self):
        assert pos_tag(["the", "cell", "degraded", "quickly", "."]) == [
            "DET", "NOUN", "VERB", "ADV", "PUNCT",
        ]

    def test_number(self):
        assert pos_tag(["3.5"]) == ["NUM"]

    def test_capitalized_non_initial(self):
        assert pos_tag(["the", "Cathode"]) == ["DET", "PROPN"]

    def test_pluggable_tagger(self):
        def shouty(tokens):
            return ["X" for _ in tokens]

        assert pos_tag(["a", "b"], tagger=shouty) == ["X", "X"]


def test_corpus_file_roundtrip(tiny_doc):
    buf = io.StringIO()
    save_corpus([tiny_doc], buf)
    buf.seek(0)
    docs = list(load_corpus(buf))
    assert len(docs) == 1
    assert docs[0] == tiny_doc

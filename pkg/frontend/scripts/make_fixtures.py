#!/usr/bin/env python3
"""Regenerate the frontend parity fixtures from the Python pipeline.

Writes tests/fixtures/qa.json (payloads, schema, question, annotation sets,
answer body) and tests/fixtures/mock_transcript.txt (the CLI `ask --mock`
output for the same fixture). Run from the frontend/ directory:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from qa_fixture import PAYLOADS, QUESTION, SCHEMA_YAML, annotation_sets, build_workspace  # noqa: E402

from litkb.annotation import annotation_set_to_dict  # noqa: E402
from litkb.corpus import load_corpus_file  # noqa: E402
from litkb.graph import load_file as load_graph_file  # noqa: E402
from litkb.qa import GenerationParams, MockBackend, Question, answer_to_dict, ask  # noqa: E402
from litkb.retrieval import load_index_file  # noqa: E402
from litkb.ontology import load_schema  # noqa: E402


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as td:
        paths = build_workspace(Path(td))
        docs = load_corpus_file(str(paths["corpus"]))
        transcript = subprocess.run(
            [
                sys.executable, "-m", "litkb.cli", "ask",
                "--index", str(paths["index"]), "--graph", str(paths["graph"]),
                "--q", QUESTION, "--mock",
            ],
            capture_output=True,
            check=True,
        ).stdout.decode("utf-8")

        answer = ask(
            Question(text=QUESTION, params=GenerationParams(model_id="mock")),
            load_index_file(str(paths["index"])),
            load_graph_file(str(paths["graph"])),
            MockBackend(),
        )

        schema = load_schema(SCHEMA_YAML)
        fixture = {
            "question": QUESTION,
            "payloads": PAYLOADS,
            "schema": {
                "entities": sorted(schema.entity_types),
                "rules": [list(r) for r in sorted(schema.relation_rules)],
            },
            "annotation_sets": [
                annotation_set_to_dict(s) for s in annotation_sets(docs)
            ],
            "doc_ids": {key: None for key in PAYLOADS},
            "answer": answer_to_dict(answer),
        }
        by_text = {doc.paragraphs[0].text: doc.doc_id for doc in docs}
        fixture["doc_ids"] = {key: by_text[text] for key, text in PAYLOADS.items()}

    (out_dir / "qa.json").write_text(
        json.dumps(fixture, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out_dir / "mock_transcript.txt").write_bytes(transcript.encode("utf-8"))
    print(f"fixtures written to {out_dir}")


if __name__ == "__main__":
    main()

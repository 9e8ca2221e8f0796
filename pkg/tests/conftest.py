from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from litkb.corpus import ingest_structured
from litkb.ontology import load_schema

FIXTURE_SCHEMA = """\
entities: [MATERIAL, PROPERTY, VALUE]
rules:
- [MATERIAL, hasProperty, PROPERTY]
- [PROPERTY, hasValue, VALUE]
"""


@pytest.fixture
def schema():
    return load_schema(FIXTURE_SCHEMA)


@pytest.fixture
def tiny_doc():
    """One document, two paragraphs, known sentence structure."""
    payload = (
        "Graphite anodes degrade quickly. Capacity loss follows.\n"
        "\n"
        "LiFePO4 cathodes keep capacity. Voltage holds at 3.2 volts."
    )
    return ingest_structured(payload, "plain-text")


@pytest.fixture(scope="session")
def shape_setup():
    """Models trained at default hyperparameters on the shape-separable
    corpus; shared by the training tests and the acceptance suite."""
    from litkb.annotation.export import export_training
    from litkb.autoann import Hyper, train_ner, train_rc
    from synth import SHAPE_SCHEMA, fixed_dev_split, shape_corpus, shape_gold

    doc = shape_corpus(seed=11, n_paragraphs=30)
    gold = shape_gold(doc)
    result = export_training([doc], [gold])
    assert not result.warnings
    train, dev = fixed_dev_split(result.records)
    hyper = Hyper()
    ner = train_ner(train, hyper)
    rc = train_rc(train, SHAPE_SCHEMA, hyper)
    return {"train": train, "dev": dev, "ner": ner, "rc": rc, "hyper": hyper}

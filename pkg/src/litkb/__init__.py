"""litkb: a literature knowledge-discovery pipeline.

Ingest structured documents, annotate them against a user ontology, train and
apply two-stage NER and relation classification, build a queryable knowledge
graph, and answer questions with retrieval-augmented generation grounded in
the ingested corpus.
"""

__version__ = "0.1.0"

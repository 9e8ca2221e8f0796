"""Command-line driver for the full pipeline, one thin subcommand per module
operation.

Exit codes: 0 success, 1 validation/processing failure, 2 usage error.
Results go to stdout in each module's documented file format; error messages
go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

from litkb.annotation import (
    ParseError,
    RevisionError,
    annotation_set_from_dict,
    annotation_set_to_dict,
    parse_standoff,
    validate,
)
from litkb.annotation.export import export_training, save_records
from litkb.autoann import (
    EvalError,
    Hyper,
    ModelIOError,
    ModelSchemaError,
    TrainError,
    auto_annotate,
    evaluate_many,
    evaluate_micro_f1,
    load_ner_model,
    load_rc_model,
    load_rules_file,
    regex_annotate,
    save_ner_model,
    save_rc_model,
    train_ner,
    train_rc,
)
from litkb.autoann.gazetteer import check_rules
from litkb.corpus import IngestError, ingest_structured, load_corpus_file, save_corpus
from litkb.graph import (
    BuildError,
    LoadError,
    QueryError,
    build_graph,
    load_file as load_graph_file,
    persist,
    query_triples,
    subgraph_for_paragraphs,
)
from litkb.ontology import SchemaError, load_schema_file
from litkb.qa import (
    BackendError,
    GenerationParams,
    HttpBackend,
    MockBackend,
    QaError,
    Question,
    ask,
    format_transcript,
)
from litkb.retrieval import (
    IndexLoadError,
    IndexMismatchError,
    index_paragraphs,
    load_index_file,
    save_index,
    top_k,
)

_FAILURES = (
    IngestError,
    SchemaError,
    ParseError,
    RevisionError,
    TrainError,
    ModelIOError,
    ModelSchemaError,
    EvalError,
    BuildError,
    QueryError,
    LoadError,
    IndexMismatchError,
    IndexLoadError,
    BackendError,
    QaError,
    FileNotFoundError,
    ValueError,
    KeyError,
)


@contextmanager
def _out_stream(path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fp:
            yield fp
    else:
        yield sys.stdout


def _load_annotation_sets(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fp:
        return [annotation_set_from_dict(json.loads(line)) for line in fp if line.strip()]


def _write_annotation_sets(sets, fp) -> None:
    for annset in sets:
        fp.write(json.dumps(annotation_set_to_dict(annset), ensure_ascii=False, sort_keys=True))
        fp.write("\n")


def _hyper_from_args(args: argparse.Namespace) -> Hyper:
    return Hyper(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        l2=args.l2,
        L_max=args.l_max,
        tau=args.tau,
        feature_dim=args.feature_dim,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    docs = []
    for path in args.files:
        with open(path, "r", encoding="utf-8") as fp:
            docs.append(ingest_structured(fp.read(), args.format))
    with _out_stream(args.out) as fp:
        save_corpus(docs, fp)
    return 0


def cmd_schema_validate(args: argparse.Namespace) -> int:
    schema = load_schema_file(args.schema)
    print(
        json.dumps(
            {
                "ok": True,
                "entities": sorted(schema.entity_types),
                "rules": [list(r) for r in sorted(schema.relation_rules)],
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_annotate_regex(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus)
    rules = load_rules_file(args.rules)
    if args.schema:
        check_rules(rules, load_schema_file(args.schema))
    sets = [regex_annotate(doc, rules) for doc in corpus]
    with _out_stream(args.out) as fp:
        _write_annotation_sets(sets, fp)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus)
    sets = _load_annotation_sets(args.annotations)
    schema = load_schema_file(args.schema)
    for annset in sets:
        report = validate(annset, schema)
        if not report.ok:
            print(f"{annset.doc_id}: {len(report.violations)} schema violations", file=sys.stderr)
            return 1
    result = export_training(corpus, sets)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    hyper = _hyper_from_args(args)
    summary = {"records": len(result.records)}
    if args.export_records:
        with open(args.export_records, "w", encoding="utf-8") as fp:
            save_records(result.records, fp)
        summary["export_records"] = args.export_records
    os.makedirs(args.model_dir, exist_ok=True)
    if args.target in ("ner", "both"):
        ner = train_ner(result.records, hyper)
        path = os.path.join(args.model_dir, "ner.npz")
        save_ner_model(ner, path)
        summary["ner"] = path
    if args.target in ("rc", "both"):
        rc = train_rc(result.records, schema, hyper)
        path = os.path.join(args.model_dir, "rc.npz")
        save_rc_model(rc, path)
        summary["rc"] = path
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_auto_annotate(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus)
    schema = load_schema_file(args.schema)
    ner = load_ner_model(os.path.join(args.model_dir, "ner.npz"))
    rc = load_rc_model(os.path.join(args.model_dir, "rc.npz"))
    sets = [auto_annotate(doc, ner, rc, schema) for doc in corpus]
    with _out_stream(args.out) as fp:
        _write_annotation_sets(sets, fp)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    if args.format == "standoff":
        if not args.text:
            print("evaluate: --text is required with standoff inputs", file=sys.stderr)
            return 2
        with open(args.text, "r", encoding="utf-8") as fp:
            text = fp.read()
        with open(args.pred, "r", encoding="utf-8") as fp:
            pred = parse_standoff(fp.read(), text, doc_id="doc", para_id="p0")
        with open(args.gold, "r", encoding="utf-8") as fp:
            gold = parse_standoff(fp.read(), text, doc_id="doc", para_id="p0")
        result = evaluate_micro_f1(pred, gold)
    else:
        preds = {s.doc_id: s for s in _load_annotation_sets(args.pred)}
        golds = {s.doc_id: s for s in _load_annotation_sets(args.gold)}
        missing = set(preds) ^ set(golds)
        if missing:
            raise EvalError(f"document selections differ: {sorted(missing)}")
        result = evaluate_many([(preds[d], golds[d]) for d in sorted(preds)])
    print(json.dumps(result.to_dict(), sort_keys=True))
    return 0


def cmd_graph_build(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus)
    sets = _load_annotation_sets(args.annotations) if args.annotations else []
    g = build_graph(corpus, sets)
    with _out_stream(args.out) as fp:
        persist(g, fp)
    return 0


def cmd_graph_triples(args: argparse.Namespace) -> int:
    g = load_graph_file(args.graph)
    triples = query_triples(
        g, head_type=args.head_type, relation=args.relation, tail_type=args.tail_type
    )
    for head, rel, tail in triples:
        print(
            json.dumps(
                {
                    "head": {
                        "node_id": head.node_id,
                        "surface": head.prop("surface"),
                        "entity_type": head.prop("entity_type"),
                    },
                    "relation": rel,
                    "tail": {
                        "node_id": tail.node_id,
                        "surface": tail.prop("surface"),
                        "entity_type": tail.prop("entity_type"),
                    },
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    return 0


def cmd_graph_subgraph(args: argparse.Namespace) -> int:
    g = load_graph_file(args.graph)
    para_ids = [p for p in args.paragraphs.split(",") if p]
    sub = subgraph_for_paragraphs(g, para_ids)
    with _out_stream(args.out) as fp:
        persist(sub, fp)
    return 0


def cmd_index_build(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus)
    index = index_paragraphs(corpus, dim=args.dim)
    with _out_stream(args.out) as fp:
        save_index(index, fp)
    return 0


def cmd_index_query(args: argparse.Namespace) -> int:
    index = load_index_file(args.index)
    for hit in top_k(index, args.q, args.k):
        print(json.dumps({"para_id": hit.para_id, "score": hit.score}, sort_keys=True))
    return 0


def cmd_ask(args: argparse.Namespace) -> int:
    index = load_index_file(args.index)
    graph = load_graph_file(args.graph)
    backend = MockBackend() if args.mock else HttpBackend()
    question = Question(
        text=args.q,
        params=GenerationParams(
            model_id=args.model_id,
            max_tokens=args.max_tokens,
            temperature=args.temperature,
        ),
    )
    answer = ask(question, index, graph, backend)
    sys.stdout.write(format_transcript(question, answer))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="litkb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest structured documents into a corpus file")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--format", choices=("tei-xml", "plain-text"), required=True)
    p.add_argument("--out", help="corpus file (default stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("schema", help="ontology schema operations")
    schema_sub = p.add_subparsers(dest="schema_command", required=True)
    pv = schema_sub.add_parser("validate", help="validate a schema file")
    pv.add_argument("--schema", required=True)
    pv.set_defaults(func=cmd_schema_validate)

    p = sub.add_parser("annotate-regex", help="rule-based auto-annotation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--rules", required=True, help="rules file: <type>\\t<regex>\\t<cs|ci>")
    p.add_argument("--schema")
    p.add_argument("--out")
    p.set_defaults(func=cmd_annotate_regex)

    p = sub.add_parser("train", help="train NER and RC models from annotations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--target", choices=("ner", "rc", "both"), default="both")
    p.add_argument("--export-records", help="also dump the sentence records (JSONL)")
    p.add_argument("--epochs", type=int, default=Hyper.epochs)
    p.add_argument("--learning-rate", type=float, default=Hyper.learning_rate)
    p.add_argument("--l2", type=float, default=Hyper.l2)
    p.add_argument("--l-max", type=int, default=Hyper.L_max)
    p.add_argument("--tau", type=float, default=Hyper.tau)
    p.add_argument("--feature-dim", type=int, default=Hyper.feature_dim)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("auto-annotate", help="apply trained models to a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_auto_annotate)

    p = sub.add_parser("evaluate", help="micro P/R/F1 of predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--format", choices=("standoff", "json"), default="standoff")
    p.add_argument("--text", help="paragraph text file (standoff mode)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("graph", help="knowledge graph operations")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    pg = graph_sub.add_parser("build")
    pg.add_argument("--corpus", required=True)
    pg.add_argument("--annotations")
    pg.add_argument("--out")
    pg.set_defaults(func=cmd_graph_build)
    pg = graph_sub.add_parser("triples")
    pg.add_argument("--graph", required=True)
    pg.add_argument("--head-type")
    pg.add_argument("--relation")
    pg.add_argument("--tail-type")
    pg.set_defaults(func=cmd_graph_triples)
    pg = graph_sub.add_parser("subgraph")
    pg.add_argument("--graph", required=True)
    pg.add_argument("--paragraphs", required=True, help="comma-separated paragraph ids")
    pg.add_argument("--out")
    pg.set_defaults(func=cmd_graph_subgraph)

    p = sub.add_parser("index", help="vector index operations")
    index_sub = p.add_subparsers(dest="index_command", required=True)
    pi = index_sub.add_parser("build")
    pi.add_argument("--corpus", required=True)
    pi.add_argument("--dim", type=int, default=256)
    pi.add_argument("--out")
    pi.set_defaults(func=cmd_index_build)
    pi = index_sub.add_parser("query")
    pi.add_argument("--index", required=True)
    pi.add_argument("--q", required=True)
    pi.add_argument("--k", type=int, default=3)
    pi.set_defaults(func=cmd_index_query)

    p = sub.add_parser("ask", help="retrieval-augmented question answering")
    p.add_argument("--index", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--mock", action="store_true", help="use the offline extractive backend")
    p.add_argument("--model-id", default="default")
    p.add_argument("--max-tokens", type=int, default=256)
    p.add_argument("--temperature", type=float, default=0.0)
    p.set_defaults(func=cmd_ask)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _FAILURES as exc:
        print(f"litkb {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
